#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "macert/experiments.hpp"

namespace macert {

enum class RefineMode { uniform, adaptive };

struct BenchmarkConfig {
  int experiment = 1;
  RefineMode mode = RefineMode::uniform;
  std::optional<double> epsilon;  // experiment default if unset
  long max_ndof = 16384;
  int initial_level = 1;
  int quad_degree = 9;
  std::optional<double> boundary_density;  // uniform per unit length; 4 per mesh boundary edge if unset
  int linf_samples = 8;
};

/// One refinement step. The first ten fields are the dat columns.
struct HistoryRow {
  long ndof = 0;
  double hinv = 0.0;  // 1 / max cell diameter
  double linf_err = 0.0;  // ‖u - u_h‖_∞
  double lhs = 0.0;  // ‖u - Γ_{u_h}‖_∞
  double l2_err = 0.0;
  double h1_err = 0.0;
  double h2_err = 0.0;
  double eta = 0.0;   // RHS_ε
  double eta2 = 0.0;  // RHS₀
  int niter = 0;

  std::size_t num_cells = 0;
  double mu = 0.0;
  double data_err_inner = 0.0;
  double data_err_global = 0.0;
  int j = 0;
  bool stagnated = false;
};

/// Thrown when the solver fails; rows holds the history computed so far.
class BenchmarkError : public std::runtime_error {
 public:
  BenchmarkError(const std::string& what, std::vector<HistoryRow> rows)
      : std::runtime_error(what), rows(std::move(rows)) {}
  std::vector<HistoryRow> rows;
};

/// solve → envelope → certificates → row → mark → refine, while ndof does
/// not exceed max_ndof. on_row is called after each step.
[[nodiscard]] std::vector<HistoryRow> run_benchmark(const BenchmarkConfig& cfg,
                                                    const std::function<void(const HistoryRow&)>& on_row = {});

inline constexpr const char* kDatHeader = "ndof hinv Linferr LHS L2error H1error H2error eta eta2 niter";

/// Header line plus one %.16e row per step.
void write_dat(std::ostream& os, const std::vector<HistoryRow>& rows);
[[nodiscard]] std::vector<HistoryRow> read_dat(std::istream& is);

/// Least-squares slope of log(column) against log(ndof) over rows
/// [first, last). Throws std::invalid_argument on fewer than two rows or a
/// nonpositive entry.
[[nodiscard]] double rate_fit(const std::vector<HistoryRow>& rows, double HistoryRow::*column, std::size_t first = 0,
                              std::size_t last = static_cast<std::size_t>(-1));

}  // namespace macert
