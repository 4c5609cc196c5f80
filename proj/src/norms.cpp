#include "macert/norms.hpp"

#include <algorithm>
#include <cmath>

namespace macert {

std::vector<Point2> cell_sample_grid(const Rect& cell, int n) {
  std::vector<Point2> out;
  if (n < 1) return out;
  if (n < 2) {
    out.push_back({cell.x0 + 0.5 * cell.hx, cell.y0 + 0.5 * cell.hy});
    return out;
  }
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.push_back({cell.x0 + cell.hx * i / (n - 1), cell.y0 + cell.hy * j / (n - 1)});
  return out;
}

ErrorNorms norms_vs_exact(const FeFunction& vh, const ScalarField& u, const QuadRule& quad, int linf_samples) {
  const RectMesh& mesh = vh.space().mesh();
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Rect& r = mesh.rect(c);
    const auto pts = quad.points(r);
    const auto wts = quad.weights(r);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const auto jet = vh.eval_in_cell(c, pts[q]);
      const double e = u.value(pts[q]) - jet.value;
      linf = std::max(linf, std::abs(e));
      l2 += wts[q] * e * e;
      if (u.gradient) {
        const Vec2 g = u.gradient(pts[q]);
        const double ex = g.x - jet.grad.x;
        const double ey = g.y - jet.grad.y;
        h1 += wts[q] * (ex * ex + ey * ey);
      }
      if (u.hessian) {
        const SymMat2 d = u.hessian(pts[q]) - jet.hess;
        h2 += wts[q] * d.dot(d);
      }
    }
    for (const Point2& p : cell_sample_grid(r, linf_samples))
      linf = std::max(linf, std::abs(u.value(p) - vh.eval_in_cell(c, p).value));
  }
  return {linf, std::sqrt(l2), std::sqrt(l2 + h1), std::sqrt(l2 + h1 + h2)};
}

}  // namespace macert
