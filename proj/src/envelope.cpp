#include "macert/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

namespace macert {

namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 cross(const Vec3& a, const Vec3& b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

using Rational = boost::multiprecision::cpp_rational;

// Sign of dot(cross(b - a, c - a), d - a): positive when d lies on the side
// the normal of the counterclockwise triangle (a, b, c) points to. Float
// filter with a forward error bound, exact rational fallback.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double adx = a.x - d.x, bdx = b.x - d.x, cdx = c.x - d.x;
  const double ady = a.y - d.y, bdy = b.y - d.y, cdy = c.y - d.y;
  const double adz = a.z - d.z, bdz = b.z - d.z, cdz = c.z - d.z;
  const double bc = bdx * cdy, cb = cdx * bdy;
  const double ca = cdx * ady, ac = adx * cdy;
  const double ab = adx * bdy, ba = bdx * ady;
  const double det = adz * (bc - cb) + bdz * (ca - ac) + cdz * (ab - ba);
  const double perm = (std::abs(bc) + std::abs(cb)) * std::abs(adz) + (std::abs(ca) + std::abs(ac)) * std::abs(bdz) +
                      (std::abs(ab) + std::abs(ba)) * std::abs(cdz);
  const double bound = 7.7715611723761027e-16 * perm;
  if (det > bound) return -1;
  if (-det > bound) return 1;
  const Rational ax = Rational(a.x) - d.x, bx = Rational(b.x) - d.x, cx = Rational(c.x) - d.x;
  const Rational ay = Rational(a.y) - d.y, by = Rational(b.y) - d.y, cy = Rational(c.y) - d.y;
  const Rational az = Rational(a.z) - d.z, bz = Rational(b.z) - d.z, cz = Rational(c.z) - d.z;
  const Rational e = az * (bx * cy - cx * by) + bz * (cx * ay - ax * cy) + cz * (ax * by - bx * ay);
  return -e.sign();
}

// Sign of the z component of cross(b - a, c - a).
int orient2d(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double l = (a.x - c.x) * (b.y - c.y);
  const double r = (a.y - c.y) * (b.x - c.x);
  const double det = l - r;
  const double bound = 3.3306690738754716e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  const Rational e = (Rational(a.x) - c.x) * (Rational(b.y) - c.y) - (Rational(a.y) - c.y) * (Rational(b.x) - c.x);
  return e.sign();
}

struct Face {
  std::array<int, 3> v;   // counterclockwise seen from outside
  std::array<int, 3> nb;  // neighbour across edge (v[i], v[i+1])
  Vec3 n;                 // outward normal, only used to rank outside points
  std::vector<int> outside;
  bool alive = true;
  int mark = 0;
};

// Incremental 3D hull. Every visibility decision is an exact orientation
// test, so the result is the hull of the given doubles; floating point only
// picks which outside point goes next.
class QuickHull {
 public:
  explicit QuickHull(const std::vector<Vec3>& p) : p_(p) {}

  std::vector<Face> run() {
    initial_simplex();
    std::vector<int> work;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
      if (!faces_[f].outside.empty()) work.push_back(f);
    while (!work.empty()) {
      const int f = work.back();
      work.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f, work);
    }
    std::vector<Face> out;
    for (auto& f : faces_)
      if (f.alive) out.push_back(std::move(f));
    return out;
  }

 private:
  bool above(const Face& f, int i) const { return orient3d(p_[f.v[0]], p_[f.v[1]], p_[f.v[2]], p_[i]) > 0; }
  double dist(const Face& f, int i) const { return dot(f.n, sub(p_[i], p_[f.v[0]])); }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.nb = {-1, -1, -1};
    const Vec3 n = cross(sub(p_[b], p_[a]), sub(p_[c], p_[a]));
    const double len = norm(n);
    f.n = len > 0.0 ? Vec3{n.x / len, n.y / len, n.z / len} : Vec3{0.0, 0.0, 0.0};
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  void initial_simplex() {
    const int n = static_cast<int>(p_.size());
    // extreme points along x, then farthest from the line, then from the plane
    int i0 = 0;
    int i1 = 0;
    for (int i = 1; i < n; ++i) {
      if (p_[i].x < p_[i0].x) i0 = i;
      if (p_[i].x > p_[i1].x) i1 = i;
    }
    const Vec3 d01 = sub(p_[i1], p_[i0]);
    int i2 = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = norm(cross(d01, sub(p_[i], p_[i0])));
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (i2 < 0) throw std::invalid_argument("LowerHull: degenerate point set");
    const Vec3 nrm = cross(d01, sub(p_[i2], p_[i0]));
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(dot(nrm, sub(p_[i], p_[i0])));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (i3 < 0) throw std::invalid_argument("LowerHull: degenerate point set");

    int a = i0, b = i1, c = i2;
    const int s = orient3d(p_[a], p_[b], p_[c], p_[i3]);
    if (s == 0) throw std::invalid_argument("LowerHull: degenerate point set");
    if (s > 0) std::swap(b, c);  // i3 below (a, b, c)
    // faces: (a,b,c), (a,d,b), (b,d,c), (c,d,a) with d = i3
    const int d = i3;
    const int f0 = make_face(a, b, c);
    const int f1 = make_face(a, d, b);
    const int f2 = make_face(b, d, c);
    const int f3 = make_face(c, d, a);
    link_all({f0, f1, f2, f3});
    for (int i = 0; i < n; ++i) {
      if (i == a || i == b || i == c || i == d) continue;
      for (int f : {f0, f1, f2, f3})
        if (above(faces_[f], i)) {
          faces_[f].outside.push_back(i);
          break;
        }
    }
  }

  // connect faces sharing edges (used for the initial simplex)
  void link_all(const std::vector<int>& fs) {
    for (int f : fs)
      for (int e = 0; e < 3; ++e) {
        const int u = faces_[f].v[e];
        const int w = faces_[f].v[(e + 1) % 3];
        for (int g : fs) {
          if (g == f) continue;
          for (int k = 0; k < 3; ++k)
            if (faces_[g].v[k] == w && faces_[g].v[(k + 1) % 3] == u) faces_[f].nb[e] = g;
        }
      }
  }

  void add_point(int f0, std::vector<int>& work) {
    // farthest outside point
    int apex = faces_[f0].outside.front();
    double far = -std::numeric_limits<double>::infinity();
    for (int i : faces_[f0].outside) {
      const double d = dist(faces_[f0], i);
      if (d > far) {
        far = d;
        apex = i;
      }
    }
    ++stamp_;
    // visible region by depth-first search; horizon edges come out in order
    std::vector<int> visible;
    std::vector<std::array<int, 3>> horizon;  // (u, w, outer face)
    std::vector<std::pair<int, int>> stack{{f0, 0}};
    faces_[f0].mark = stamp_;
    visible.push_back(f0);
    while (!stack.empty()) {
      auto& [f, e] = stack.back();
      if (e == 3) {
        stack.pop_back();
        continue;
      }
      const int edge = e++;
      const int g = faces_[f].nb[edge];
      if (faces_[g].mark == stamp_) continue;
      if (above(faces_[g], apex)) {
        faces_[g].mark = stamp_;
        visible.push_back(g);
        stack.push_back({g, 0});
      } else {
        horizon.push_back({faces_[f].v[edge], faces_[f].v[(edge + 1) % 3], g});
      }
    }

    std::vector<int> created;
    std::unordered_map<int, int> by_start;  // horizon start vertex -> new face
    for (const auto& [u, w, outer] : horizon) {
      const int nf = make_face(u, w, apex);
      created.push_back(nf);
      by_start[u] = nf;
      faces_[nf].nb[0] = outer;
      for (int k = 0; k < 3; ++k)
        if (faces_[outer].v[k] == w && faces_[outer].v[(k + 1) % 3] == u) faces_[outer].nb[k] = nf;
    }
    for (int nf : created) {
      const int w = faces_[nf].v[1];
      const int next = by_start.at(w);  // shares edge (w, apex)
      faces_[nf].nb[1] = next;
      faces_[next].nb[2] = nf;
    }

    for (int f : visible) {
      faces_[f].alive = false;
      for (int i : faces_[f].outside) {
        if (i == apex) continue;
        for (int nf : created)
          if (above(faces_[nf], i)) {
            faces_[nf].outside.push_back(i);
            break;
          }
      }
      std::vector<int>().swap(faces_[f].outside);
    }
    for (int nf : created)
      if (!faces_[nf].outside.empty()) work.push_back(nf);
  }

  const std::vector<Vec3>& p_;
  std::vector<Face> faces_;
  int stamp_ = 0;
};

}  // namespace

LowerHull::LowerHull(std::vector<Point2> xy, std::vector<double> z) : xy_(std::move(xy)), z_(std::move(z)) {
  if (xy_.size() != z_.size()) throw std::invalid_argument("LowerHull: size mismatch");
  if (xy_.size() < 3) throw std::invalid_argument("LowerHull: need at least 3 points");
  const std::size_t n = xy_.size();
  double zmin = z_[0];
  double zmax = z_[0];
  double xmin = xy_[0].x, xmax = xy_[0].x, ymin = xy_[0].y, ymax = xy_[0].y;
  for (std::size_t i = 0; i < n; ++i) {
    zmin = std::min(zmin, z_[i]);
    zmax = std::max(zmax, z_[i]);
    xmin = std::min(xmin, xy_[i].x);
    xmax = std::max(xmax, xy_[i].x);
    ymin = std::min(ymin, xy_[i].y);
    ymax = std::max(ymax, xy_[i].y);
    scale_ = std::max(scale_, std::abs(z_[i]) + 1.0);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  if (!(span > 0.0)) throw std::invalid_argument("LowerHull: degenerate point set");

  // apex far above the cloud keeps the hull three-dimensional for planar data
  std::vector<Vec3> p(n + 1);
  for (std::size_t i = 0; i < n; ++i) p[i] = {xy_[i].x, xy_[i].y, z_[i]};
  const double lift = (zmax - zmin) + span;
  p[n] = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax), zmax + lift};

  // collinear xy input: the apex adds only one dimension
  {
    const Point2 a = xy_[0];
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::hypot(xy_[i].x - a.x, xy_[i].y - a.y);
      if (d > best) {
        best = d;
        far = i;
      }
    }
    const Point2 b = xy_[far];
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      off = std::max(off, std::abs((b.x - a.x) * (xy_[i].y - a.y) - (b.y - a.y) * (xy_[i].x - a.x)));
    if (off <= 1e-12 * span * span) throw std::invalid_argument("LowerHull: collinear points");
  }

  for (const Face& f : QuickHull(p).run()) {
    if (f.v[0] == static_cast<int>(n) || f.v[1] == static_cast<int>(n) || f.v[2] == static_cast<int>(n)) continue;
    if (orient2d(p[f.v[0]], p[f.v[1]], p[f.v[2]]) >= 0) continue;  // upper or vertical
    facets_.push_back(f.v);
  }

  x0_ = xmin;
  y0_ = ymin;
  const double fx = xmax - xmin;
  const double fy = ymax - ymin;
  const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(facets_.size()) / 2.0)));
  nbx_ = fx > 0 ? target : 1;
  nby_ = fy > 0 ? target : 1;
  bw_ = fx > 0 ? fx / nbx_ : 1.0;
  bh_ = fy > 0 ? fy / nby_ : 1.0;
  buckets_.assign(static_cast<std::size_t>(nbx_) * nby_, {});
  auto bx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - x0_) / bw_)), 0, nbx_ - 1); };
  auto by = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - y0_) / bh_)), 0, nby_ - 1); };
  const double pad = 1e-12 * span;
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    double lx = xmax, hx = xmin, ly = ymax, hy = ymin;
    for (int v : facets_[f]) {
      lx = std::min(lx, xy_[v].x);
      hx = std::max(hx, xy_[v].x);
      ly = std::min(ly, xy_[v].y);
      hy = std::max(hy, xy_[v].y);
    }
    for (int i = bx(lx - pad); i <= bx(hx + pad); ++i)
      for (int j = by(ly - pad); j <= by(hy + pad); ++j)
        buckets_[static_cast<std::size_t>(j) * nbx_ + i].push_back(static_cast<int>(f));
  }

  // the hull is exact; this guards the evaluation
  for (std::size_t i = 0; i < n; ++i)
    if (gap(i) < -1e-9 * scale_) throw std::runtime_error("LowerHull: facet above the data at a sample point");
}

// Lower facets tile the xy hull. Interpolate in the bucket facet whose
// smallest barycentric weight is largest; outside points clamp to the nearest.
double LowerHull::operator()(Point2 p) const {
  const int i = std::clamp(static_cast<int>(std::floor((p.x - x0_) / bw_)), 0, nbx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - y0_) / bh_)), 0, nby_ - 1);
  double best_min = -std::numeric_limits<double>::infinity();
  double value = std::numeric_limits<double>::quiet_NaN();
  for (int f : buckets_[static_cast<std::size_t>(j) * nbx_ + i]) {
    const auto& v = facets_[f];
    const Point2 a = xy_[v[0]], b = xy_[v[1]], c = xy_[v[2]];
    const double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (area == 0.0) continue;
    std::array<double, 3> w{((b.x - p.x) * (c.y - p.y) - (b.y - p.y) * (c.x - p.x)) / area,
                            ((c.x - p.x) * (a.y - p.y) - (c.y - p.y) * (a.x - p.x)) / area, 0.0};
    w[2] = 1.0 - w[0] - w[1];
    const double m = std::min({w[0], w[1], w[2]});
    if (m <= best_min) continue;
    best_min = m;
    if (m < 0.0) {
      for (double& x : w) x = std::max(x, 0.0);
      const double s = w[0] + w[1] + w[2];
      for (double& x : w) x /= s;
    }
    value = w[0] * z_[v[0]] + w[1] * z_[v[1]] + w[2] * z_[v[2]];
  }
  return value;
}

namespace {

SampleSet interior_samples(const RectMesh& mesh, const QuadRule& quad) {
  SampleSet s;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Rect& r = mesh.rect(c);
    const auto pts = quad.points(r);
    const auto wts = quad.weights(r);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      s.points.push_back(pts[q]);
      s.cell.push_back(static_cast<int>(c));
      s.weight.push_back(wts[q]);
    }
  }
  s.num_interior = s.points.size();
  return s;
}

// arc length from the origin, counterclockwise, in [0, 4)
double perimeter_param(Point2 p) {
  if (p.y == 0.0 && p.x < 1.0) return p.x;
  if (p.x == 1.0 && p.y < 1.0) return 1.0 + p.y;
  if (p.y == 1.0 && p.x > 0.0) return 3.0 - p.x;
  return p.y > 0.0 ? 4.0 - p.y : 0.0;
}

}  // namespace

SampleSet build_samples(const RectMesh& mesh, const QuadRule& quad, double boundary_density) {
  if (!(boundary_density > 0.0)) throw std::invalid_argument("build_samples: boundary_density must be positive");
  SampleSet s = interior_samples(mesh, quad);
  const int m = std::max(1, static_cast<int>(std::ceil(boundary_density - 1e-9)));
  const std::array<Point2, 4> corner = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  for (int side = 0; side < 4; ++side) {
    const Point2 a = corner[side];
    const Point2 b = corner[(side + 1) % 4];
    for (int k = 0; k < m; ++k) {
      const double t = static_cast<double>(k) / m;
      s.points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return s;
}

SampleSet build_samples_graded(const RectMesh& mesh, const QuadRule& quad, int per_edge) {
  if (per_edge < 1) throw std::invalid_argument("build_samples_graded: per_edge must be positive");
  SampleSet s = interior_samples(mesh, quad);
  std::vector<std::pair<double, Point2>> bnd;
  for (const BoundaryEdge& e : mesh.boundary_edges())
    for (int k = 0; k < per_edge; ++k) {
      const double t = static_cast<double>(k) / per_edge;
      for (const Point2 p : {Point2{e.a.x + t * (e.b.x - e.a.x), e.a.y + t * (e.b.y - e.a.y)}, e.b})
        bnd.emplace_back(perimeter_param(p), p);
    }
  std::sort(bnd.begin(), bnd.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < bnd.size(); ++k)
    if (k == 0 || bnd[k].first != bnd[k - 1].first) s.points.push_back(bnd[k].second);
  return s;
}

LowerHull envelope_hull(const FeFunction& vh, const SampleSet& samples) {
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    z[i] = i < samples.num_interior ? vh.eval_in_cell(samples.cell[i], samples.points[i]).value
                                    : vh.value(samples.points[i]);
  return LowerHull(samples.points, std::move(z));
}

std::vector<bool> contact_set(const LowerHull& hull, const FeFunction& vh, const SampleSet& samples, double gap_tol,
                              double psd_tol) {
  std::vector<bool> out(samples.num_interior, false);
  const double tol = gap_tol * hull.scale();
  for (std::size_t i = 0; i < samples.num_interior; ++i) {
    if (hull.gap(i) > tol) continue;
    const SymMat2 H = vh.eval_in_cell(samples.cell[i], samples.points[i]).hess;
    out[i] = H.eigen().mu1 >= -psd_tol * H.frobenius();
  }
  return out;
}

double boundary_residual(const LowerHull& hull, const ScalarField& g, const SampleSet& samples) {
  const std::size_t nb = samples.num_boundary();
  double mu = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    const Point2 a = samples.points[samples.num_interior + k];
    const Point2 b = samples.points[samples.num_interior + (k + 1) % nb];
    const Point2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    mu = std::max({mu, std::abs(g.value(a) - hull(a)), std::abs(g.value(mid) - hull(mid))});
  }
  return mu;
}

std::vector<std::array<int, 3>> sample_triangulation(const SampleSet& samples) {
  // deterministic tiny perturbation breaks the cocircular ties of tensor grids
  std::vector<double> z(samples.size());
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    h ^= h >> 12;
    h ^= h << 25;
    h ^= h >> 27;
    const double r = static_cast<double>((h * 0x2545F4914F6CDD1Dull) >> 11) * 0x1.0p-53;
    const Point2 p = samples.points[i];
    z[i] = p.x * p.x + p.y * p.y + 1e-10 * r;
  }
  return LowerHull(samples.points, std::move(z)).facets();
}

double envelope_gap(const FeFunction& vh, const SampleSet& samples, int k) {
  k = std::max(k, 1);
  std::vector<double> nodal(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) nodal[i] = vh.value(samples.points[i]);
  double gap = 0.0;
  for (const auto& t : sample_triangulation(samples)) {
    const Point2 a = samples.points[t[0]];
    const Point2 b = samples.points[t[1]];
    const Point2 c = samples.points[t[2]];
    for (int i = 0; i <= k; ++i)
      for (int j = 0; i + j <= k; ++j) {
        const double l1 = static_cast<double>(i) / k;
        const double l2 = static_cast<double>(j) / k;
        const double l0 = 1.0 - l1 - l2;
        const Point2 p{l0 * a.x + l1 * b.x + l2 * c.x, l0 * a.y + l1 * b.y + l2 * c.y};
        const double lin = l0 * nodal[t[0]] + l1 * nodal[t[1]] + l2 * nodal[t[2]];
        gap = std::max(gap, std::abs(vh.value(p) - lin));
      }
  }
  return gap;
}

}  // namespace macert
