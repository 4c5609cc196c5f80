#include "macert/hjb_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace macert {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Shape Hessians at the quadrature points of a square cell of a given level;
// they depend only on the cell size.
class HessianTable {
 public:
  explicit HessianTable(const QuadRule& quad) : quad_(quad) {}

  const std::vector<std::array<SymMat2, 16>>& at(const Rect& r) {
    auto it = cache_.find(r.level);
    if (it != cache_.end()) return it->second;
    const Rect ref{0.0, 0.0, r.hx, r.hy, r.level};
    std::vector<std::array<SymMat2, 16>> tab;
    for (const Point2& p : quad_.points(ref)) tab.push_back(shape_eval(ref, p).hess);
    return cache_.emplace(r.level, std::move(tab)).first->second;
  }

 private:
  const QuadRule& quad_;
  std::map<int, std::vector<std::array<SymMat2, 16>>> cache_;
};

struct Assembly {
  Eigen::VectorXd residual;
  double floor = 0.0;  // roundoff level of the residual: eps times the norm of |integrand| sums
  SpMat matrix;
  Eigen::VectorXd rhs;
};

class Assembler {
 public:
  Assembler(const BfsSpace& space, const HjbProblem& problem, const QuadRule& quad)
      : space_(space), problem_(problem), quad_(quad), table_(quad) {
    const RectMesh& mesh = space.mesh();
    fvals_.resize(mesh.num_cells());
    double f2 = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto pts = quad.points(mesh.rect(c));
      const auto wts = quad.weights(mesh.rect(c));
      for (std::size_t q = 0; q < pts.size(); ++q) {
        fvals_[c].push_back(problem.f(pts[q]));
        f2 += wts[q] * fvals_[c].back() * fvals_[c].back();
      }
    }
    f_norm_ = std::sqrt(f2);
  }

  [[nodiscard]] double f_norm() const { return f_norm_; }

  // poisson: freeze A = I/2 instead of the maximizing policy.
  Assembly run(const FeFunction& u, bool with_matrix, bool poisson) {
    const RectMesh& mesh = space_.mesh();
    const int n = space_.ndof();
    Assembly out;
    out.residual = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd mag = Eigen::VectorXd::Zero(n);
    if (with_matrix) out.rhs = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    const auto& fixed = u.fixed_values();

    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Rect& r = mesh.rect(c);
      const auto& hess = table_.at(r);
      const auto wts = quad_.weights(r);
      const auto coef = u.local_coefficients(c);
      std::array<double, 16> re{};
      std::array<double, 16> ra{};
      std::array<double, 16> be{};
      std::array<double, 256> ke{};
      for (std::size_t q = 0; q < wts.size(); ++q) {
        SymMat2 H;
        std::array<double, 16> lap{};
        for (int k = 0; k < 16; ++k) {
          H = H + coef[k] * hess[q][k];
          lap[k] = hess[q][k].trace();
        }
        const double f = fvals_[c][q];
        const OperatorValue ev = eval_F(poisson ? 0.5 : problem_.epsilon, f, H);
        const double w = wts[q];
        const double size = H.frobenius() + std::abs(f);
        for (int i = 0; i < 16; ++i) {
          re[i] += w * ev.value * lap[i];
          ra[i] += w * size * std::abs(lap[i]);
        }
        if (!with_matrix) continue;
        const SymMat2& A = ev.policy.A;
        const double src = f * ev.policy.sqrt_det();
        std::array<double, 16> aj{};
        for (int j = 0; j < 16; ++j) aj[j] = A.dot(hess[q][j]);
        for (int i = 0; i < 16; ++i) {
          be[i] += w * src * lap[i];
          const double wl = w * lap[i];
          for (int j = 0; j < 16; ++j) ke[16 * i + j] += wl * aj[j];
        }
      }

      const auto& cm = space_.cell_map(c);
      const std::size_t nd = cm.dofs.size();
      const std::size_t nf = cm.fixed_slots.size();
      for (std::size_t a = 0; a < nd; ++a) {
        double acc = 0.0;
        double am = 0.0;
        for (int k = 0; k < 16; ++k) {
          acc += cm.C[k * nd + a] * re[k];
          am += std::abs(cm.C[k * nd + a]) * ra[k];
        }
        out.residual[cm.dofs[a]] += acc;
        mag[cm.dofs[a]] += am;
      }
      if (!with_matrix) continue;
      // load minus the contribution of the fixed boundary slots
      std::array<double, 16> fixed_local{};
      for (int k = 0; k < 16; ++k)
        for (std::size_t b = 0; b < nf; ++b) fixed_local[k] += cm.D[k * nf + b] * fixed[cm.fixed_slots[b]];
      std::array<double, 16> load{};
      for (int i = 0; i < 16; ++i) {
        double acc = be[i];
        for (int j = 0; j < 16; ++j) acc -= ke[16 * i + j] * fixed_local[j];
        load[i] = acc;
      }
      // KC = ke * C (16 x nd), then C^T * KC
      std::vector<double> kc(16 * nd, 0.0);
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
          const double kij = ke[16 * i + j];
          if (kij == 0.0) continue;
          for (std::size_t b = 0; b < nd; ++b) kc[i * nd + b] += kij * cm.C[j * nd + b];
        }
      for (std::size_t a = 0; a < nd; ++a) {
        double acc = 0.0;
        for (int i = 0; i < 16; ++i) acc += cm.C[i * nd + a] * load[i];
        out.rhs[cm.dofs[a]] += acc;
        for (std::size_t b = 0; b < nd; ++b) {
          double m = 0.0;
          for (int i = 0; i < 16; ++i) m += cm.C[i * nd + a] * kc[i * nd + b];
          if (m != 0.0) trip.emplace_back(cm.dofs[a], cm.dofs[b], m);
        }
      }
    }
    out.floor = std::numeric_limits<double>::epsilon() * mag.norm();
    if (with_matrix) {
      out.matrix.resize(n, n);
      out.matrix.setFromTriplets(trip.begin(), trip.end());
      out.matrix.makeCompressed();
    }
    return out;
  }

 private:
  const BfsSpace& space_;
  const HjbProblem& problem_;
  const QuadRule& quad_;
  HessianTable table_;
  std::vector<std::vector<double>> fvals_;
  double f_norm_ = 0.0;
};

std::vector<double> solve_linear(const SpMat& K, const Eigen::VectorXd& rhs) {
  Eigen::UmfPackLU<SpMat> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw SolverError("factorization of the linearized system failed (singular or out of memory)");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("linear solve failed");
  return {x.data(), x.data() + x.size()};
}

}  // namespace

double galerkin_residual(const FeFunction& u, const HjbProblem& problem, const QuadRule& quad) {
  Assembler as(u.space(), problem, quad);
  return as.run(u, false, false).residual.norm();
}

SolveResult solve_hjb(std::shared_ptr<const BfsSpace> space, const HjbProblem& problem, const QuadRule& quad,
                      const SolverOptions& opts, const FeFunction* warm_start) {
  const BfsSpace& S = *space;
  std::vector<double> fixed = S.interpolate_boundary(problem.g);
  Assembler as(S, problem, quad);
  const double tol = opts.tol_factor * (1.0 + as.f_norm());

  FeFunction u(space, std::vector<double>(S.ndof(), 0.0), fixed);
  if (S.ndof() == 0) return {u, 0, 0.0, tol, true};
  if (warm_start) {
    const FeFunction& w = *warm_start;
    const ScalarField field{[&](Point2 p) { return w.value(p); }, [&](Point2 p) { return w.gradient(p); },
                            [&](Point2 p) { return w.hessian(p); }};
    u = FeFunction(space, FeFunction::interpolate(space, field).free_values(), fixed);
  } else {
    Assembly a0 = as.run(u, true, true);
    u = FeFunction(space, solve_linear(a0.matrix, a0.rhs), fixed);
  }

  SolveResult res{u, 0, 0.0, tol, false};
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int it = 0;; ++it) {
    Assembly a = as.run(u, true, false);
    const double r = a.residual.norm();
    // roundoff floor: Newton stops reducing the residual
    const double window = std::max(opts.stall_window * tol, opts.floor_factor * a.floor);
    stall = (r > opts.stall_ratio * best && r <= window) ? stall + 1 : 0;
    if (r < best) {
      best = r;
      res.u = u;
      res.residual = r;
    }
    if (r <= tol) {
      res.converged = true;
      break;
    }
    if (stall >= 2) {
      res.converged = true;
      res.stagnated = true;
      break;
    }
    if (res.niter >= opts.max_iter) break;
    std::vector<double> cand = solve_linear(a.matrix, a.rhs);
    ++res.niter;
    FeFunction next(space, cand, fixed);
    double rn = as.run(next, false, false).residual.norm();
    // damped step if the full step does not reduce the residual
    double lambda = 1.0;
    for (int h = 0; h < opts.max_halvings && !(rn < r); ++h) {
      lambda *= 0.5;
      std::vector<double> mix(cand.size());
      for (std::size_t i = 0; i < cand.size(); ++i)
        mix[i] = u.free_values()[i] + lambda * (cand[i] - u.free_values()[i]);
      FeFunction trial(space, std::move(mix), fixed);
      const double rt = as.run(trial, false, false).residual.norm();
      if (rt < rn) {
        rn = rt;
        next = std::move(trial);
      }
    }
    u = std::move(next);
  }
  return res;
}

}  // namespace macert
