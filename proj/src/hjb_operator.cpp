#include "macert/hjb_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace macert {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");
}

double objective(double t, double mu1, double mu2, double fval) {
  return -(t * mu1 + (1.0 - t) * mu2) + fval * std::sqrt(t * (1.0 - t));
}

}  // namespace

double Policy::sqrt_det() const { return std::sqrt(t * (1.0 - t)); }

OperatorValue eval_F(double eps, double fval, const SymMat2& M) {
  check_eps(eps);
  const auto e = M.eigen();
  const double d = e.mu2 - e.mu1;
  double t = eps;
  if (fval > 0.0) {
    // stationary point of the concave objective: (2t - 1) / (2 sqrt(t(1-t))) = d / f
    const double r = d / fval;
    const double s = std::isinf(r) ? 1.0 : r / std::hypot(1.0, r);
    t = std::clamp(0.5 * (1.0 + s), eps, 1.0 - eps);
  } else if (d > 0.0) {
    // convex or linear objective; the endpoint weighting mu1 wins
    t = 1.0 - eps;
  }
  OperatorValue out;
  out.value = objective(t, e.mu1, e.mu2, fval);
  out.policy.t = t;
  out.policy.c = e.c;
  out.policy.s = e.s;
  const double c = e.c;
  const double s = e.s;
  out.policy.A = {t * c * c + (1.0 - t) * s * s, (2.0 * t - 1.0) * c * s, t * s * s + (1.0 - t) * c * c};
  return out;
}

double xi_of(double eps, const SymMat2& M) {
  check_eps(eps);
  const auto e = M.eigen();
  const double bound = (std::abs(e.mu1) + std::abs(e.mu2)) / std::sqrt(eps * (1.0 - eps)) + 1.0;
  double lo = -bound;
  double hi = bound;
  double x = 0.0;
  const double tol = 1e-14 * (1.0 + M.frobenius());
  for (int it = 0; it < 300; ++it) {
    const auto ev = eval_F(eps, x, M);
    if (std::abs(ev.value) <= tol) return x;
    if (ev.value > 0.0)
      hi = x;
    else
      lo = x;
    // Newton step with dPsi/dxi = sqrt(det A) at the current argmax, kept inside the bracket
    double next = x - ev.value / ev.policy.sqrt_det();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
      return next;
    x = next;
  }
  return x;
}

}  // namespace macert
