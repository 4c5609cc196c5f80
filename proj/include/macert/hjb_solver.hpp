#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>

#include "macert/bfs_space.hpp"
#include "macert/hjb_operator.hpp"
#include "macert/quadrature.hpp"

namespace macert {

struct HjbProblem {
  double epsilon = 1e-3;
  std::function<double(Point2)> f;
  ScalarField g;  // boundary data; value and gradient are used on the boundary
};

struct SolverOptions {
  double tol_factor = 1e-11;  // tol = tol_factor * (1 + ||f||)
  int max_iter = 50;
  int max_halvings = 12;
  // Two successive iterates within max(stall_window * tol, floor_factor *
  // floor) that fail to cut the best residual by stall_ratio mean roundoff
  // dominates; the iteration then stops and reports convergence. floor is
  // machine epsilon times the norm of the summed |integrand| per test
  // function, which grows with |D^2 u_h| on small cells.
  double stall_ratio = 0.5;
  double stall_window = 1e4;
  double floor_factor = 100.0;
};

struct SolveResult {
  FeFunction u;
  int niter = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool converged = false;
  bool stagnated = false;  // stopped at the roundoff floor above tol
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Galerkin solution of F_eps(f; D^2 u_h) tested against the Laplacians of
/// the free basis functions, by policy iteration started from the Poisson
/// problem Delta u = f, or from the Hermite interpolant of warm_start (any
/// space on the same domain). Throws SolverError if a linearized system is
/// singular.
[[nodiscard]] SolveResult solve_hjb(std::shared_ptr<const BfsSpace> space, const HjbProblem& problem,
                                    const QuadRule& quad, const SolverOptions& opts = {},
                                    const FeFunction* warm_start = nullptr);

/// Euclidean norm of the Galerkin residual vector at u.
[[nodiscard]] double galerkin_residual(const FeFunction& u, const HjbProblem& problem, const QuadRule& quad);

}  // namespace macert
