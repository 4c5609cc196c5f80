#include "macert/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace macert {

GaussRule1D gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  GaussRule1D r;
  r.nodes.resize(npoints);
  r.weights.resize(npoints);
  const int n = npoints;
  // Legendre P_n(x) and its derivative by the three-term recurrence
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1], ascending order
    r.nodes[i] = 0.5 * (1.0 - x);
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = r.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.5;
  return r;
}

QuadRule::QuadRule(int degree) : degree_(degree) {
  if (degree < 1) throw std::invalid_argument("QuadRule: degree must be positive");
  rule_ = gauss_legendre((degree + 2) / 2);
  const auto n = rule_.nodes.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ref_points_.push_back({rule_.nodes[i], rule_.nodes[j]});
      ref_weights_.push_back(rule_.weights[i] * rule_.weights[j]);
    }
}

std::vector<Point2> QuadRule::points(const Rect& cell) const {
  std::vector<Point2> out;
  out.reserve(ref_points_.size());
  for (const auto& p : ref_points_) out.push_back({cell.x0 + p.x * cell.hx, cell.y0 + p.y * cell.hy});
  return out;
}

std::vector<double> QuadRule::weights(const Rect& cell) const {
  std::vector<double> out;
  out.reserve(ref_weights_.size());
  for (double w : ref_weights_) out.push_back(w * cell.area());
  return out;
}

}  // namespace macert
