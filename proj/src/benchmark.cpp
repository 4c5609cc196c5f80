#include "macert/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "macert/envelope.hpp"
#include "macert/estimator.hpp"
#include "macert/hjb_solver.hpp"
#include "macert/norms.hpp"

namespace macert {

namespace {

// max |u - Γ| over the samples and a per-cell grid
double envelope_error(const LowerHull& hull, const ScalarField& u, const RectMesh& mesh, const SampleSet& samples,
                      int linf_samples) {
  double m = 0.0;
  for (const Point2& p : samples.points) m = std::max(m, std::abs(u.value(p) - hull(p)));
  for (const Rect& r : mesh.rects())
    for (const Point2& p : cell_sample_grid(r, linf_samples)) m = std::max(m, std::abs(u.value(p) - hull(p)));
  return m;
}

}  // namespace

std::vector<HistoryRow> run_benchmark(const BenchmarkConfig& cfg, const std::function<void(const HistoryRow&)>& on_row) {
  const Experiment ex = make_experiment(cfg.experiment);
  const double eps = cfg.epsilon.value_or(ex.default_epsilon);
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");
  if (cfg.initial_level < 0 || cfg.initial_level > 12) throw std::invalid_argument("initial level out of range");
  if (cfg.boundary_density && !(*cfg.boundary_density > 0.0))
    throw std::invalid_argument("boundary density must be positive");

  const QuadRule quad(cfg.quad_degree);
  const HjbProblem problem{eps, ex.f, ex.g};
  RectMesh mesh = RectMesh::init_uniform(cfg.initial_level);
  auto space = std::make_shared<const BfsSpace>(mesh);
  if (space->ndof() > cfg.max_ndof) throw std::invalid_argument("max-ndof is below the initial ndof");

  std::vector<HistoryRow> rows;
  std::optional<FeFunction> prev;  // warm start from the previous mesh
  while (space->ndof() <= cfg.max_ndof) {
    std::optional<SolveResult> solved;
    try {
      solved.emplace(solve_hjb(space, problem, quad, {}, prev ? &*prev : nullptr));
      if (!solved->converged && prev) solved.emplace(solve_hjb(space, problem, quad));
    } catch (const SolverError& e) {
      throw BenchmarkError(std::string("solver failed at ndof ") + std::to_string(space->ndof()) + ": " + e.what(),
                           rows);
    }
    const SolveResult& sol = *solved;
    if (!sol.converged)
      throw BenchmarkError("policy iteration did not converge at ndof " + std::to_string(space->ndof()), rows);

    const FeFunction& uh = sol.u;
    const SampleSet samples = cfg.boundary_density ? build_samples(mesh, quad, *cfg.boundary_density)
                                                   : build_samples_graded(mesh, quad, 4);
    const LowerHull hull = envelope_hull(uh, samples);
    const auto contact = contact_set(hull, uh, samples);
    const ErrorCertificate c0 = rhs0(uh, ex.f, ex.g, samples, hull, contact);
    const ErrorCertificate ce = rhs_eps(uh, ex.f, ex.g, eps, samples);
    const ErrorNorms err = norms_vs_exact(uh, ex.u, quad, cfg.linf_samples);

    HistoryRow row;
    row.ndof = space->ndof();
    row.hinv = 1.0 / mesh.max_diameter();
    row.linf_err = err.linf;
    row.lhs = envelope_error(hull, ex.u, mesh, samples, cfg.linf_samples);
    row.l2_err = err.l2;
    row.h1_err = err.h1;
    row.h2_err = err.h2;
    row.eta = ce.rhs;
    row.eta2 = c0.rhs;
    row.niter = sol.niter;
    row.num_cells = mesh.num_cells();
    row.mu = c0.mu;
    row.data_err_inner = c0.data_err_inner;
    row.data_err_global = c0.data_err_global;
    row.j = c0.j;
    row.stagnated = sol.stagnated;
    rows.push_back(row);
    if (on_row) on_row(row);
    prev = uh;

    if (cfg.mode == RefineMode::adaptive) {
      const auto marked = mark_cells(c0, boundary_edge_errors(uh, ex.g), mesh);
      mesh = marked.empty() ? mesh.refine_all() : mesh.refine(marked);
    } else {
      mesh = mesh.refine_all();
    }
    space = std::make_shared<const BfsSpace>(mesh);
  }
  return rows;
}

void write_dat(std::ostream& os, const std::vector<HistoryRow>& rows) {
  os << kDatHeader << '\n';
  char buf[32];
  for (const HistoryRow& r : rows) {
    const double cols[] = {static_cast<double>(r.ndof), r.hinv, r.linf_err, r.lhs, r.l2_err,
                           r.h1_err, r.h2_err, r.eta, r.eta2, static_cast<double>(r.niter)};
    for (std::size_t k = 0; k < std::size(cols); ++k) {
      std::snprintf(buf, sizeof buf, "%.16e", cols[k]);
      os << (k ? " " : "") << buf;
    }
    os << '\n';
  }
}

std::vector<HistoryRow> read_dat(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kDatHeader) throw std::runtime_error("missing dat header");
  std::vector<HistoryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double c[10];
    for (double& v : c)
      if (!(ls >> v)) throw std::runtime_error("malformed dat row: " + line);
    HistoryRow r;
    r.ndof = std::lround(c[0]);
    r.hinv = c[1];
    r.linf_err = c[2];
    r.lhs = c[3];
    r.l2_err = c[4];
    r.h1_err = c[5];
    r.h2_err = c[6];
    r.eta = c[7];
    r.eta2 = c[8];
    r.niter = static_cast<int>(std::lround(c[9]));
    rows.push_back(r);
  }
  return rows;
}

double rate_fit(const std::vector<HistoryRow>& rows, double HistoryRow::*column, std::size_t first, std::size_t last) {
  last = std::min(last, rows.size());
  if (first >= last || last - first < 2) throw std::invalid_argument("rate_fit needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(last - first);
  for (std::size_t i = first; i < last; ++i) {
    const double v = rows[i].*column;
    if (!(v > 0.0) || rows[i].ndof <= 0) throw std::invalid_argument("rate_fit needs positive values");
    const double x = std::log(static_cast<double>(rows[i].ndof));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw std::invalid_argument("rate_fit needs distinct ndof");
  return (n * sxy - sx * sy) / den;
}

}  // namespace macert
