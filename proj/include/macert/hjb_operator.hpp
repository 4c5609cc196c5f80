#pragma once

#include "macert/sym_mat2.hpp"

namespace macert {

/// Maximizing coefficient A = t v1 v1^T + (1-t) v2 v2^T, where v1 = (c, s)
/// is the eigenvector of the smaller eigenvalue of M.
struct Policy {
  double t = 0.5;
  double c = 1.0;
  double s = 0.0;
  SymMat2 A{0.5, 0.0, 0.5};

  [[nodiscard]] double sqrt_det() const;
};

struct OperatorValue {
  double value = 0.0;
  Policy policy;
};

/// F_eps(f; M) = max over A in S(eps) of -A:M + f sqrt(det A), n = 2.
/// Throws std::invalid_argument unless 0 < eps <= 1/2.
[[nodiscard]] OperatorValue eval_F(double eps, double fval, const SymMat2& M);

/// The unique xi with F_eps(xi; M) = 0.
[[nodiscard]] double xi_of(double eps, const SymMat2& M);

}  // namespace macert
