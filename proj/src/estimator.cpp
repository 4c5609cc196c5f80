#include "macert/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "macert/hjb_operator.hpp"

namespace macert {

double bound_value(double boundary, double jdelta, double inner, double global) {
  return boundary + 0.5 * (1.0 - 2.0 * jdelta) * inner + 0.5 * std::pow(2.0, 0.25) * std::sqrt(jdelta) * global;
}

int select_j(const std::vector<double>& value) {
  for (std::size_t j = 0; j + 1 < value.size(); ++j)
    if (value[j + 1] > value[j]) return static_cast<int>(j);
  return value.empty() ? 0 : static_cast<int>(value.size()) - 1;
}

std::vector<double> ma_density(const FeFunction& vh, const SampleSet& samples, const std::vector<bool>& contact) {
  std::vector<double> fh(samples.num_interior, 0.0);
  for (std::size_t i = 0; i < samples.num_interior; ++i) {
    if (!contact[i]) continue;
    const double det = vh.eval_in_cell(samples.cell[i], samples.points[i]).hess.det();
    fh[i] = 2.0 * std::sqrt(std::max(det, 0.0));
  }
  return fh;
}

std::vector<double> hjb_density(const FeFunction& vh, const SampleSet& samples, double epsilon) {
  std::vector<double> fh(samples.num_interior);
  for (std::size_t i = 0; i < samples.num_interior; ++i)
    fh[i] = xi_of(epsilon, vh.eval_in_cell(samples.cell[i], samples.points[i]).hess);
  return fh;
}

DataErrorNorms data_error_norms(const RectMesh& mesh, const SampleSet& samples, const std::vector<double>& residual,
                                const InteriorBand& band) {
  DataErrorNorms out;
  out.cell_inner_sq.assign(mesh.num_cells(), 0.0);
  out.cell_global_sq.assign(mesh.num_cells(), 0.0);
  double inner = 0.0;
  double global = 0.0;
  for (std::size_t i = 0; i < samples.num_interior; ++i) {
    const double e = samples.weight[i] * residual[i] * residual[i];
    out.cell_global_sq[samples.cell[i]] += e;
    global += e;
    if (band.contains(samples.points[i])) {
      out.cell_inner_sq[samples.cell[i]] += e;
      inner += e;
    }
  }
  out.inner = std::sqrt(inner);
  out.global = std::sqrt(global);
  return out;
}

ErrorCertificate certify(const RectMesh& mesh, const SampleSet& samples, const std::vector<double>& residual,
                         double boundary_term) {
  ErrorCertificate c;
  c.mu = boundary_term;
  c.delta = mesh.min_edge_length();
  const std::size_t n = samples.num_interior;

  // squared contributions sorted by boundary distance; suffix sums give the
  // inner norm of every band in one pass
  std::vector<std::pair<double, double>> pts(n);
  double global_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {InteriorBand::boundary_distance(samples.points[i]), samples.weight[i] * residual[i] * residual[i]};
    global_sq += pts[i].second;
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> dist(n);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    dist[i] = pts[i].first;
    suffix[i] = suffix[i + 1] + pts[i].second;
  }
  const double global = std::sqrt(global_sq);
  std::vector<double> value;
  for (int j = 0; InteriorBand{j, c.delta}.valid(); ++j) {
    const double jd = j * c.delta;
    const auto k = std::lower_bound(dist.begin(), dist.end(), jd) - dist.begin();
    value.push_back(bound_value(boundary_term, jd, std::sqrt(suffix[k]), global));
  }
  c.j = select_j(value);

  const InteriorBand band{c.j, c.delta};
  const DataErrorNorms norms = data_error_norms(mesh, samples, residual, band);
  c.data_err_inner = norms.inner;
  c.data_err_global = norms.global;
  const double jd = band.offset();
  c.rhs = bound_value(boundary_term, jd, norms.inner, norms.global);
  c.sigma = c.rhs - c.mu;
  c.eta.resize(mesh.num_cells());
  const double s = 1.0 - 2.0 * jd;
  for (std::size_t t = 0; t < mesh.num_cells(); ++t)
    c.eta[t] = jd * std::sqrt(2.0) * norms.cell_global_sq[t] + s * s * norms.cell_inner_sq[t];
  return c;
}

namespace {

std::vector<double> residual_of(const std::function<double(Point2)>& f, const SampleSet& samples,
                                const std::vector<double>& fh) {
  std::vector<double> r(samples.num_interior);
  for (std::size_t i = 0; i < samples.num_interior; ++i) r[i] = f(samples.points[i]) - fh[i];
  return r;
}

// max |g - w| over the boundary samples and their midpoints
template <class W>
double boundary_sup(const ScalarField& g, const SampleSet& samples, W w) {
  const std::size_t nb = samples.num_boundary();
  double m = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const Point2 a = samples.points[samples.num_interior + k];
    const Point2 b = samples.points[samples.num_interior + (k + 1) % nb];
    const Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    m = std::max({m, std::abs(g.value(a) - w(a)), std::abs(g.value(mid) - w(mid))});
  }
  return m;
}

}  // namespace

ErrorCertificate rhs0(const FeFunction& vh, const std::function<double(Point2)>& f, const ScalarField& g,
                      const SampleSet& samples, const LowerHull& hull, const std::vector<bool>& contact,
                      bool safeguard) {
  double mu = boundary_residual(hull, g, samples);
  if (safeguard) {
    const std::size_t nb = samples.num_boundary();
    double lip = 0.0;
    double gap = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      const Point2 a = samples.points[samples.num_interior + k];
      const Point2 b = samples.points[samples.num_interior + (k + 1) % nb];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      const Vec2 ga = g.gradient(a);
      const double tg = std::abs(ga.x * (b.x - a.x) + ga.y * (b.y - a.y)) / len;
      lip = std::max(lip, tg + std::abs(hull(b) - hull(a)) / len);
      gap = std::max(gap, len);
    }
    mu += 0.5 * gap * lip;
  }
  return certify(vh.space().mesh(), samples, residual_of(f, samples, ma_density(vh, samples, contact)), mu);
}

ErrorCertificate rhs_eps(const FeFunction& vh, const std::function<double(Point2)>& f, const ScalarField& g,
                         double epsilon, const SampleSet& samples) {
  const double bnd = boundary_sup(g, samples, [&](Point2 p) { return vh.value(p); });
  return certify(vh.space().mesh(), samples, residual_of(f, samples, hjb_density(vh, samples, epsilon)), bnd);
}

std::vector<double> boundary_edge_errors(const FeFunction& vh, const ScalarField& g, int n) {
  const RectMesh& mesh = vh.space().mesh();
  std::vector<double> out;
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    double m = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      const Point2 p{e.a.x + t * (e.b.x - e.a.x), e.a.y + t * (e.b.y - e.a.y)};
      m = std::max(m, std::abs(g.value(p) - vh.eval_in_cell(e.cell, p).value));
    }
    out.push_back(m);
  }
  return out;
}

std::vector<int> mark_cells(const ErrorCertificate& cert, const std::vector<double>& edge_errors,
                            const RectMesh& mesh) {
  std::vector<int> marked;
  const double worst = edge_errors.empty() ? 0.0 : *std::max_element(edge_errors.begin(), edge_errors.end());
  if (cert.sigma / 10.0 < worst) {
    std::vector<int> order(edge_errors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return edge_errors[a] > edge_errors[b]; });
    const std::size_t count = (edge_errors.size() + 4) / 5;
    for (std::size_t k = 0; k < count; ++k) marked.push_back(mesh.boundary_edges()[order[k]].cell);
  } else {
    std::vector<int> order(cert.eta.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cert.eta[a] > cert.eta[b]; });
    const double total = std::accumulate(cert.eta.begin(), cert.eta.end(), 0.0);
    double acc = 0.0;
    for (int t : order) {
      if (total <= 0.0 || acc >= 0.5 * total) break;
      marked.push_back(t);
      acc += cert.eta[t];
    }
  }
  std::sort(marked.begin(), marked.end());
  marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
  return marked;
}

}  // namespace macert
