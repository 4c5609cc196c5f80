#pragma once

#include "macert/bfs_space.hpp"
#include "macert/quadrature.hpp"

namespace macert {

struct ErrorNorms {
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;  // full H1 norm
  double h2 = 0.0;  // full H2 norm, piecewise on cells
};

/// Errors of v_h against an exact solution. L2/H1/H2 by quadrature; L-infinity
/// as the max over quadrature points and a closed linf_samples x linf_samples
/// grid on every cell.
[[nodiscard]] ErrorNorms norms_vs_exact(const FeFunction& vh, const ScalarField& u, const QuadRule& quad,
                                        int linf_samples = 8);

/// Points of the closed n x n grid on a cell (vertices included).
[[nodiscard]] std::vector<Point2> cell_sample_grid(const Rect& cell, int n);

}  // namespace macert
