#include <gtest/gtest.h>

#include <cmath>

#include "macert/quadrature.hpp"

using namespace macert;

TEST(Quadrature, PointCounts) {
  EXPECT_EQ(QuadRule(1).points_per_cell(), 1);
  EXPECT_EQ(QuadRule(3).points_per_cell(), 4);
  EXPECT_EQ(QuadRule(9).points_per_cell(), 25);
  EXPECT_EQ(QuadRule().degree(), 9);
}

TEST(Quadrature, ExactForTensorMonomials) {
  const Rect cell{0.25, 0.5, 0.125, 0.125, 3};
  for (int deg = 1; deg <= 13; ++deg) {
    QuadRule q(deg);
    const auto pts = q.points(cell);
    const auto wts = q.weights(cell);
    for (int i = 0; i <= deg; ++i)
      for (int j = 0; j <= deg; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) s += wts[k] * std::pow(pts[k].x, i) * std::pow(pts[k].y, j);
        auto antider = [](double a, double b, int p) {
          return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
        };
        const double exact = antider(cell.x0, cell.x0 + cell.hx, i) * antider(cell.y0, cell.y0 + cell.hy, j);
        EXPECT_NEAR(s, exact, 1e-12 * std::abs(exact)) << "deg " << deg << " i " << i << " j " << j;
      }
  }
}

TEST(Quadrature, PointsStrictlyInside) {
  const Rect cell{0.0, 0.0, 0.5, 0.5, 1};
  for (int deg : {1, 5, 9, 15}) {
    QuadRule q(deg);
    for (const auto& p : q.points(cell)) {
      EXPECT_GT(p.x, 0.0);
      EXPECT_LT(p.x, 0.5);
      EXPECT_GT(p.y, 0.0);
      EXPECT_LT(p.y, 0.5);
    }
  }
}

TEST(Quadrature, KnownGaussNodes) {
  auto r = gauss_legendre(2);
  EXPECT_NEAR(r.nodes[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
  auto r3 = gauss_legendre(3);
  EXPECT_NEAR(r3.nodes[1], 0.5, 0.0);
  EXPECT_NEAR(r3.weights[1], 4.0 / 9.0, 1e-15);
}
