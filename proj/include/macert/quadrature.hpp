#pragma once

#include <vector>

#include "macert/geometry.hpp"

namespace macert {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

[[nodiscard]] GaussRule1D gauss_legendre(int npoints);

/// Tensor Gauss rule exact for polynomials of degree <= degree in each
/// coordinate; uses ceil((degree + 1) / 2) points per direction.
class QuadRule {
 public:
  explicit QuadRule(int degree = 9);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] int points_per_direction() const { return static_cast<int>(rule_.nodes.size()); }
  [[nodiscard]] int points_per_cell() const { return points_per_direction() * points_per_direction(); }

  /// Reference coordinates in [0,1]^2 and weights summing to 1, x-major.
  [[nodiscard]] const std::vector<Point2>& ref_points() const { return ref_points_; }
  [[nodiscard]] const std::vector<double>& ref_weights() const { return ref_weights_; }

  /// Physical points and weights (weights sum to the cell area).
  [[nodiscard]] std::vector<Point2> points(const Rect& cell) const;
  [[nodiscard]] std::vector<double> weights(const Rect& cell) const;

 private:
  int degree_;
  GaussRule1D rule_;
  std::vector<Point2> ref_points_;
  std::vector<double> ref_weights_;
};

}  // namespace macert
