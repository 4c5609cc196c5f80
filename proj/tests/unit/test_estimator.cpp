#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "../support/operator_oracle.hpp"
#include "macert/estimator.hpp"

using namespace macert;

namespace {

ScalarField quadratic(double a, double b, double c) {
  // 1/2 (a x^2 + 2 b x y + c y^2)
  return {[=](Point2 p) { return 0.5 * (a * p.x * p.x + 2 * b * p.x * p.y + c * p.y * p.y); },
          [=](Point2 p) { return Vec2{a * p.x + b * p.y, b * p.x + c * p.y}; },
          [=](Point2) { return SymMat2{a, b, c}; }};
}

const ScalarField kZero{[](Point2) { return 0.0; }, [](Point2) { return Vec2{}; }, [](Point2) { return SymMat2{}; }};

FeFunction interp(int level, const ScalarField& u) {
  return FeFunction::interpolate(std::make_shared<const BfsSpace>(RectMesh::init_uniform(level)), u);
}

}  // namespace

TEST(Estimator, BoundValueTerms) {
  EXPECT_DOUBLE_EQ(bound_value(0.3, 0.0, 2.0, 5.0), 0.3 + 1.0);
  const double jd = 0.125;
  EXPECT_NEAR(bound_value(0.0, jd, 1.0, 1.0), 0.5 * 0.75 + 0.5 * std::pow(2.0, 0.25) * std::sqrt(jd), 1e-15);
}

TEST(Estimator, SelectFirstAscent) {
  EXPECT_EQ(select_j({5, 3, 2, 4, 1}), 2);
  EXPECT_EQ(select_j({1, 2, 3}), 0);
  EXPECT_EQ(select_j({3, 2, 1}), 2);
  EXPECT_EQ(select_j({7}), 0);
}

TEST(Estimator, ExactQuadraticHasZeroDataError) {
  const auto vh = interp(2, quadratic(1, 0, 1));
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16);
  const LowerHull h = envelope_hull(vh, s);
  const auto contact = contact_set(h, vh, s);
  const auto fh = ma_density(vh, s, contact);
  for (double v : fh) EXPECT_NEAR(v, 2.0, 1e-12);
  const auto cert = rhs0(vh, [](Point2) { return 2.0; }, quadratic(1, 0, 1), s, h, contact);
  EXPECT_LE(cert.data_err_global, 1e-11);
  // only the chord error of g = x^2/2 at boundary midpoints remains: h^2/8
  EXPECT_NEAR(cert.mu, 1.0 / (8 * 16 * 16), 1e-12);
  EXPECT_NEAR(cert.rhs, cert.mu, 1e-10);
}

TEST(Estimator, QuadraticBoundWithDenseBoundarySampling) {
  const auto vh = interp(2, quadratic(1, 0, 1));
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 512);
  const LowerHull h = envelope_hull(vh, s);
  const auto cert = rhs0(vh, [](Point2) { return 2.0; }, quadratic(1, 0, 1), s, h, contact_set(h, vh, s));
  EXPECT_LE(cert.rhs, 1e-6);
}

TEST(Estimator, ConstantResidualBandNorms) {
  const RectMesh mesh = RectMesh::init_uniform(3);
  const SampleSet s = build_samples(mesh, QuadRule(9), 32);
  const std::vector<double> r(s.num_interior, 1.0);
  for (int j : {0, 1, 2, 3}) {
    const auto n = data_error_norms(mesh, s, r, {j, 0.125});
    EXPECT_NEAR(n.global, 1.0, 1e-13);
    EXPECT_NEAR(n.inner, 1.0 - 2 * j * 0.125, 1e-13);
  }
}

TEST(Estimator, ZeroFunctionConstantData) {
  const auto vh = interp(2, kZero);
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16);
  const LowerHull h = envelope_hull(vh, s);
  const auto contact = contact_set(h, vh, s);
  for (bool c : contact) EXPECT_TRUE(c);
  const auto cert = rhs0(vh, [](Point2) { return 1.0; }, kZero, s, h, contact);
  EXPECT_NEAR(cert.data_err_global, 1.0, 1e-13);
  EXPECT_NEAR(cert.data_err_inner, 1.0 - 2 * cert.j * cert.delta, 1e-13);
  EXPECT_EQ(cert.mu, 0.0);
}

TEST(Estimator, SelectedJIsFirstLocalMinimum) {
  const RectMesh mesh = RectMesh::init_uniform(4);
  const SampleSet s = build_samples(mesh, QuadRule(9), 64);
  std::vector<double> r(s.num_interior);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = InteriorBand::boundary_distance(s.points[i]);
    r[i] = 1.0 / (d + 0.01);
  }
  const auto cert = certify(mesh, s, r, 0.01);
  auto value = [&](int j) {
    const auto n = data_error_norms(mesh, s, r, {j, cert.delta});
    return bound_value(0.01, j * cert.delta, n.inner, n.global);
  };
  EXPECT_GT(cert.j, 0);
  for (int j = 0; j < cert.j; ++j) EXPECT_LE(value(j + 1), value(j));
  EXPECT_GT(value(cert.j + 1), value(cert.j));
  EXPECT_NEAR(cert.rhs, value(cert.j), 1e-14 * cert.rhs);
}

TEST(Estimator, IndicatorsReproduceGlobalNorms) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  const RectMesh mesh = RectMesh::init_uniform(3).refine({0, 5, 17});
  const SampleSet s = build_samples(mesh, QuadRule(9), 64);
  std::vector<double> r(s.num_interior);
  for (auto& v : r) v = U(rng);
  const auto c = certify(mesh, s, r, 0.0);
  const double jd = c.j * c.delta;
  const double sum = std::accumulate(c.eta.begin(), c.eta.end(), 0.0);
  const double expect = jd * std::sqrt(2.0) * c.data_err_global * c.data_err_global +
                        (1 - 2 * jd) * (1 - 2 * jd) * c.data_err_inner * c.data_err_inner;
  EXPECT_NEAR(sum, expect, 1e-12 * expect);
}

TEST(Estimator, DataTermsScaleLinearly) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-1, 1);
  const RectMesh mesh = RectMesh::init_uniform(3);
  const SampleSet s = build_samples(mesh, QuadRule(9), 32);
  std::vector<double> r(s.num_interior);
  for (auto& v : r) v = U(rng);
  const auto a = data_error_norms(mesh, s, r, {2, 0.125});
  for (double lambda : {0.0, 0.5, 3.0}) {
    std::vector<double> q = r;
    for (auto& v : q) v *= lambda;
    const auto b = data_error_norms(mesh, s, q, {2, 0.125});
    EXPECT_NEAR(b.inner, lambda * a.inner, 1e-14 * (1 + a.inner));
    EXPECT_NEAR(b.global, lambda * a.global, 1e-14 * (1 + a.global));
  }
}

// Monge-Ampere density of a convex quadratic is its Hessian determinant
TEST(Estimator, MeasureIdentityOnQuadratics) {
  const double a = 2.0, b = 0.5, c = 1.0;
  const auto vh = interp(2, quadratic(a, b, c));
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16);
  const auto contact = contact_set(envelope_hull(vh, s), vh, s);
  const auto fh = ma_density(vh, s, contact);
  for (double v : fh) EXPECT_NEAR(0.25 * v * v, a * c - b * b, 1e-11);
}

TEST(Estimator, HjbDensityOfRadialQuadratic) {
  const auto vh = interp(2, quadratic(1, 0, 1));
  const SampleSet s = build_samples(vh.space().mesh(), QuadRule(9), 16);
  for (double eps : {1e-3, 0.1, 0.2}) {
    for (double v : hjb_density(vh, s, eps)) EXPECT_NEAR(v, 2.0, 1e-12);
    const auto cert = rhs_eps(vh, [](Point2) { return 2.0; }, quadratic(1, 0, 1), eps, s);
    EXPECT_LE(cert.rhs, 1e-10);
  }
}

TEST(Estimator, HjbDensityMatchesBisectionOracle) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  auto S = std::make_shared<const BfsSpace>(RectMesh::init_uniform(1));
  std::vector<double> free(S->ndof());
  for (auto& v : free) v = U(rng);
  const FeFunction vh(S, free, S->interpolate_boundary(kZero));
  const SampleSet s = build_samples(S->mesh(), QuadRule(3), 4);
  const double eps = 0.05;
  const auto fh = hjb_density(vh, s, eps);
  for (std::size_t i = 0; i < s.num_interior; ++i) {
    const auto e = vh.eval_in_cell(s.cell[i], s.points[i]).hess.eigen();
    EXPECT_NEAR(fh[i], oracle::xi_oracle(eps, e.mu1, e.mu2), 1e-8 * (1 + std::abs(fh[i])));
  }
  const auto cert = rhs_eps(vh, [](Point2) { return 1.0; }, kZero, eps, s);
  EXPECT_GE(cert.rhs, 0.0);
  EXPECT_GE(cert.data_err_global, cert.data_err_inner);
}

TEST(Marking, DorflerPrefix) {
  const RectMesh mesh = RectMesh::init_uniform(1);
  ErrorCertificate c;
  c.sigma = 1.0;
  c.eta = {4, 3, 2, 1};
  EXPECT_EQ(mark_cells(c, {0.0}, mesh), (std::vector<int>{0, 1}));
  c.eta = {1, 3, 3, 1};
  EXPECT_EQ(mark_cells(c, {0.0}, mesh), (std::vector<int>{1, 2}));
}

TEST(Marking, BoundaryBranch) {
  const RectMesh mesh = RectMesh::init_uniform(2).refine({0, 15});
  ASSERT_EQ(mesh.boundary_edges().size(), 20u);
  ErrorCertificate c;
  c.sigma = 100.0;
  c.eta.assign(mesh.num_cells(), 1.0);
  std::vector<double> err(20, 1.0);
  err[3] = 20.0;
  const auto m1 = mark_cells(c, err, mesh);
  // 20 edges -> 4 marked edges
  std::vector<double> distinct(20);
  for (int k = 0; k < 20; ++k) distinct[k] = 11.0 + k;
  const auto m2 = mark_cells(c, distinct, mesh);
  std::vector<int> owners;
  for (int k = 16; k < 20; ++k) owners.push_back(mesh.boundary_edges()[k].cell);
  std::sort(owners.begin(), owners.end());
  owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
  EXPECT_EQ(m2, owners);
  EXPECT_LE(m1.size(), 4u);
  EXPECT_TRUE(std::find(m1.begin(), m1.end(), mesh.boundary_edges()[3].cell) != m1.end());
  // sigma/10 = 10 is not below 10: bulk branch
  std::vector<double> small(20, 10.0);
  EXPECT_EQ(mark_cells(c, small, mesh).size(), (mesh.num_cells() + 1) / 2);
}

TEST(Marking, EdgeErrorsVanishForInterpolatedQuadratic) {
  const auto vh = interp(2, quadratic(1, 0.3, 2));
  for (double e : boundary_edge_errors(vh, quadratic(1, 0.3, 2))) EXPECT_LE(e, 1e-14);
}
