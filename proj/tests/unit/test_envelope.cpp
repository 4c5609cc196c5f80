#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "../support/envelope_oracle.hpp"
#include "macert/envelope.hpp"

using namespace macert;

namespace {

std::vector<Point2> grid(int nx, int ny) {
  std::vector<Point2> out;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) out.push_back({static_cast<double>(i) / (nx - 1), static_cast<double>(j) / (ny - 1)});
  return out;
}

ScalarField poly(double cxx, double cxy, double cyy, double bx = 0, double by = 0) {
  return {[=](Point2 p) { return cxx * p.x * p.x + cxy * p.x * p.y + cyy * p.y * p.y + bx * p.x + by * p.y; },
          [=](Point2 p) { return Vec2{2 * cxx * p.x + cxy * p.y + bx, cxy * p.x + 2 * cyy * p.y + by}; },
          [=](Point2) { return SymMat2{2 * cxx, cxy, 2 * cyy}; }};
}

FeFunction interp(int level, const ScalarField& u) {
  return FeFunction::interpolate(std::make_shared<const BfsSpace>(RectMesh::init_uniform(level)), u);
}

}  // namespace

TEST(LowerHull, AffineDataIsItsOwnEnvelope) {
  const auto xy = grid(6, 4);
  std::vector<double> z;
  for (auto p : xy) z.push_back(0.3 - 1.7 * p.x + 0.4 * p.y);
  const LowerHull h(xy, z);
  for (std::size_t i = 0; i < xy.size(); ++i) EXPECT_NEAR(h.gap(i), 0.0, 1e-13);
  EXPECT_NEAR(h({0.37, 0.81}), 0.3 - 1.7 * 0.37 + 0.4 * 0.81, 1e-13);
}

TEST(LowerHull, CentreBumpIsCutOff) {
  const auto xy = grid(3, 3);
  std::vector<double> z(9, 0.0);
  z[4] = 1.0;
  const LowerHull h(xy, z);
  EXPECT_NEAR(h({0.5, 0.5}), 0.0, 1e-14);
  EXPECT_NEAR(h.gap(4), 1.0, 1e-14);
  EXPECT_NEAR(h({0.2, 0.7}), 0.0, 1e-14);
}

TEST(LowerHull, ConvexNodesAndMidEdges) {
  const auto xy = grid(5, 5);
  std::vector<double> z;
  for (auto p : xy) z.push_back(p.x * p.x + p.y * p.y);
  const LowerHull h(xy, z);
  for (std::size_t i = 0; i < xy.size(); ++i) EXPECT_NEAR(h(xy[i]), z[i], 1e-12);
  // midpoint of a horizontal grid edge: average of the two nodal values
  for (int i = 0; i < 4; ++i) {
    const double x0 = i / 4.0, x1 = (i + 1) / 4.0, y = 0.5;
    EXPECT_NEAR(h({0.5 * (x0 + x1), y}), 0.5 * (x0 * x0 + x1 * x1) + y * y, 1e-12);
  }
}

TEST(LowerHull, CollinearInputThrows) {
  std::vector<Point2> xy = {{0, 0}, {0.5, 0.5}, {1, 1}};
  EXPECT_THROW(LowerHull(xy, {0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(LowerHull({{0, 0}, {1, 0}}, {0, 1}), std::invalid_argument);
  EXPECT_THROW(LowerHull(xy, {0, 1}), std::invalid_argument);
}

TEST(LowerHull, MatchesSupportingPlaneOracle) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_real_distribution<double> V(-1.0, 1.0);
  for (int nx = 2; nx <= 9; ++nx)
    for (int ny = 2; ny <= 9; ++ny) {
      const auto xy = grid(nx, ny);
      std::vector<double> z;
      for (std::size_t i = 0; i < xy.size(); ++i) z.push_back(V(rng));
      const LowerHull h(xy, z);
      const auto planes = oracle::supporting_planes(xy, z);
      for (int q = 0; q < 50; ++q) {
        const Point2 p{U(rng), U(rng)};
        EXPECT_NEAR(h(p), oracle::envelope_at(planes, p), 1e-10) << nx << "x" << ny;
      }
      for (std::size_t i = 0; i < xy.size(); ++i) EXPECT_GE(h.gap(i), -1e-12);
    }
}

TEST(LowerHull, ScatteredPointsMatchOracle) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Point2> xy = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int k = 0; k < 40; ++k) xy.push_back({U(rng), U(rng)});
    std::vector<double> z;
    for (auto p : xy) z.push_back(std::sin(5 * p.x) * std::cos(3 * p.y) + U(rng));
    const LowerHull h(xy, z);
    const auto planes = oracle::supporting_planes(xy, z);
    for (int q = 0; q < 50; ++q) {
      const Point2 p{U(rng), U(rng)};
      EXPECT_NEAR(h(p), oracle::envelope_at(planes, p), 1e-10);
    }
  }
}

TEST(LowerHull, EnvelopeIsConvex) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto xy = grid(9, 9);
  std::vector<double> z;
  for (std::size_t i = 0; i < xy.size(); ++i) z.push_back(U(rng));
  const LowerHull h(xy, z);
  for (int k = 0; k < 1000; ++k) {
    const Point2 a{U(rng), U(rng)};
    const Point2 b{U(rng), U(rng)};
    const double l = U(rng);
    const Point2 m{l * a.x + (1 - l) * b.x, l * a.y + (1 - l) * b.y};
    EXPECT_LE(h(m), l * h(a) + (1 - l) * h(b) + 1e-12);
  }
}

TEST(Samples, CountsAndCorners) {
  const RectMesh m = RectMesh::init_uniform(0);
  const SampleSet s = build_samples(m, QuadRule(1), 2.0);
  EXPECT_EQ(s.num_interior, 1u);
  EXPECT_EQ(s.num_boundary(), 8u);
  int corners = 0;
  for (auto p : s.points)
    if ((p.x == 0 || p.x == 1) && (p.y == 0 || p.y == 1)) ++corners;
  EXPECT_EQ(corners, 4);
  EXPECT_THROW((void)build_samples(m, QuadRule(1), 0.0), std::invalid_argument);
}

TEST(Samples, DoublingDensityHalvesBoundaryGap) {
  const RectMesh m = RectMesh::init_uniform(1);
  auto max_gap = [&](double density) {
    const SampleSet s = build_samples(m, QuadRule(3), density);
    double g = 0;
    for (std::size_t k = 0; k < s.num_boundary(); ++k) {
      const Point2 a = s.points[s.num_interior + k];
      const Point2 b = s.points[s.num_interior + (k + 1) % s.num_boundary()];
      g = std::max(g, std::hypot(a.x - b.x, a.y - b.y));
    }
    return g;
  };
  EXPECT_NEAR(max_gap(8.0), 0.5 * max_gap(4.0), 1e-15);
  EXPECT_EQ(build_samples(m, QuadRule(3), 4.0).num_interior, 16u);
}

TEST(Contact, ConvexQuadraticFlagsEverything) {
  const auto vh = interp(2, poly(0.5, 0.2, 0.5));
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16.0);
  const LowerHull h = envelope_hull(vh, s);
  for (bool f : contact_set(h, vh, s)) EXPECT_TRUE(f);
}

TEST(Contact, IndefiniteHessianIsFiltered) {
  const auto convex = interp(2, poly(1.0, 0.0, 1.0));
  const auto saddle = interp(2, poly(1.0, 0.0, -1.0));
  const SampleSet s = build_samples(convex.space().mesh(), QuadRule(9), 16.0);
  const LowerHull h = envelope_hull(convex, s);
  for (bool f : contact_set(h, saddle, s)) EXPECT_FALSE(f);
}

// The C1 interpolant of |x - 1/2| dips below the V inside the kink cells, so
// the flat parts are not contact points; D2 has rank <= 1 everywhere, which is
// what makes the Monge-Ampere density vanish.
TEST(Contact, KinkInterpolantHasZeroDeterminant) {
  const ScalarField kink{[](Point2 p) { return std::abs(p.x - 0.5); },
                         [](Point2 p) { return Vec2{p.x > 0.5 ? 1.0 : (p.x < 0.5 ? -1.0 : 0.0), 0.0}; },
                         [](Point2) { return SymMat2{}; }};
  const auto vh = interp(3, kink);
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 32.0);
  const LowerHull h = envelope_hull(vh, s);
  const auto flags = contact_set(h, vh, s);
  for (std::size_t i = 0; i < s.num_interior; ++i) {
    const double d = s.points[i].x - 0.5;
    if (std::abs(d) < 0.125 && std::abs(d) > 0.125 * 2.0 / 3.0) EXPECT_FALSE(flags[i]);
    EXPECT_NEAR(vh.eval_in_cell(s.cell[i], s.points[i]).hess.det(), 0.0, 1e-12);
  }
}

// x in the exact contact set (checked against a fine grid) must be flagged
TEST(Contact, ExactContactImpliesFlag) {
  const ScalarField w{[](Point2 p) {
                        const double d = p.x - 0.5;
                        return d * d * d * d - 0.05 * d * d + 0.5 * p.y * p.y;
                      },
                      [](Point2 p) {
                        const double d = p.x - 0.5;
                        return Vec2{4 * d * d * d - 0.1 * d, p.y};
                      },
                      [](Point2 p) {
                        const double d = p.x - 0.5;
                        return SymMat2{12 * d * d - 0.1, 0.0, 1.0};
                      }};
  const auto vh = interp(2, w);
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16.0);
  const LowerHull h = envelope_hull(vh, s);
  const auto flags = contact_set(h, vh, s);
  std::vector<Point2> probe = s.points;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) probe.push_back({i / 100.0, j / 100.0});
  int exact = 0;
  for (std::size_t i = 0; i < s.num_interior; ++i) {
    const auto jet = vh.eval_in_cell(s.cell[i], s.points[i]);
    const Point2 x = s.points[i];
    bool supported = true;
    for (const Point2& z : probe) {
      if (vh.value(z) - jet.value - jet.grad.x * (z.x - x.x) - jet.grad.y * (z.y - x.y) < 0.0) {
        supported = false;
        break;
      }
    }
    if (supported) {
      ++exact;
      EXPECT_TRUE(flags[i]) << x.x << " " << x.y;
    }
  }
  EXPECT_GT(exact, 0);
  EXPECT_LT(exact, static_cast<int>(s.num_interior));
}

TEST(BoundaryResidual, ZeroForNonnegativeBubble) {
  const ScalarField bubble{[](Point2 p) { return p.x * (1 - p.x) * p.y * (1 - p.y); },
                           [](Point2 p) {
                             return Vec2{(1 - 2 * p.x) * p.y * (1 - p.y), p.x * (1 - p.x) * (1 - 2 * p.y)};
                           },
                           [](Point2 p) {
                             return SymMat2{-2 * p.y * (1 - p.y), (1 - 2 * p.x) * (1 - 2 * p.y), -2 * p.x * (1 - p.x)};
                           }};
  const ScalarField zero{[](Point2) { return 0.0; }, [](Point2) { return Vec2{}; }, [](Point2) { return SymMat2{}; }};
  const auto vh = interp(2, bubble);
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16.0);
  EXPECT_NEAR(boundary_residual(envelope_hull(vh, s), zero, s), 0.0, 1e-14);
}

TEST(BoundaryResidual, ConvexTraceBoundedByGap) {
  const ScalarField u = poly(1.0, 0.3, 0.7, -0.2, 0.1);
  const auto vh = interp(2, u);
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16.0);
  const LowerHull h = envelope_hull(vh, s);
  const double delta = envelope_gap(vh, s);
  EXPECT_LE(boundary_residual(h, u, s), delta + 1e-14);
}

TEST(EnvelopeGap, AffineIsZero) {
  const auto vh = interp(2, poly(0, 0, 0, 0.7, -0.3));
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(5), 8.0);
  EXPECT_LE(envelope_gap(vh, s), 1e-14);
}

TEST(EnvelopeGap, DecaysUnderRefinement) {
  const ScalarField u = poly(1.0, 0.0, 0.5);
  double prev = 0;
  for (int level = 1; level <= 3; ++level) {
    const auto vh = interp(level, u);
    const SampleSet s = build_samples(vh.space().mesh(), QuadRule(5), 4.0 * (1 << level));
    const double d = envelope_gap(vh, s);
    EXPECT_GT(d, 0.0);
    if (level > 1) EXPECT_LE(d, 0.5 * prev);
    prev = d;
  }
}

TEST(EnvelopeGap, SandwichAtSamples) {
  const ScalarField u{[](Point2 p) { return std::sin(3 * p.x) * std::cos(2 * p.y); },
                      [](Point2 p) { return Vec2{3 * std::cos(3 * p.x) * std::cos(2 * p.y), -2 * std::sin(3 * p.x) * std::sin(2 * p.y)}; },
                      [](Point2 p) {
                        return SymMat2{-9 * std::sin(3 * p.x) * std::cos(2 * p.y), -6 * std::cos(3 * p.x) * std::sin(2 * p.y),
                                       -4 * std::sin(3 * p.x) * std::cos(2 * p.y)};
                      }};
  const auto vh = interp(2, u);
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(5), 16.0);
  const LowerHull h = envelope_hull(vh, s);
  const double delta = envelope_gap(vh, s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(h(s.points[i]) - delta, vh.value(s.points[i]) + 1e-12);
}

TEST(Triangulation, CoversTheSquare) {
  const SampleSet s = build_samples(RectMesh::init_uniform(2).refine({0}), QuadRule(5), 8.0);
  const auto tris = sample_triangulation(s);
  double area = 0;
  std::vector<int> used(s.size(), 0);
  for (const auto& t : tris) {
    const Point2 a = s.points[t[0]], b = s.points[t[1]], c = s.points[t[2]];
    area += 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    for (int v : t) used[v] = 1;
  }
  EXPECT_NEAR(area, 1.0, 1e-12);
  for (int u : used) EXPECT_EQ(u, 1);
}
