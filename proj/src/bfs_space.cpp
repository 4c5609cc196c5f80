#include "macert/bfs_space.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace macert {

namespace {

// Cubic Hermite basis on [0,1]: h[0], h[2] interpolate values at 0 and 1,
// h[1], h[3] interpolate slopes at 0 and 1.
struct Hermite1D {
  std::array<double, 4> f;
  std::array<double, 4> d1;
  std::array<double, 4> d2;
};

Hermite1D hermite(double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {{1.0 - 3.0 * s2 + 2.0 * s3, s - 2.0 * s2 + s3, 3.0 * s2 - 2.0 * s3, -s2 + s3},
          {-6.0 * s + 6.0 * s2, 1.0 - 4.0 * s + 3.0 * s2, 6.0 * s - 6.0 * s2, -2.0 * s + 3.0 * s2},
          {-6.0 + 12.0 * s, -4.0 + 6.0 * s, 6.0 - 12.0 * s, -2.0 + 6.0 * s}};
}

constexpr int kCornerA[4] = {0, 1, 0, 1};
constexpr int kCornerB[4] = {0, 0, 1, 1};

using Expansion = std::vector<std::pair<int, double>>;

void axpy(Expansion& out, const Expansion& in, double k) {
  if (k == 0.0) return;
  for (const auto& [slot, c] : in) out.emplace_back(slot, k * c);
}

Expansion compress(Expansion e) {
  std::map<int, double> acc;
  for (const auto& [slot, c] : e) acc[slot] += c;
  Expansion out;
  for (const auto& [slot, c] : acc)
    if (c != 0.0) out.emplace_back(slot, c);
  return out;
}

}  // namespace

ShapeValues shape_eval(const Rect& cell, Point2 p) {
  const double tol = 1e-12 * std::max(cell.hx, cell.hy);
  if (!cell.contains(p, tol)) throw std::out_of_range("shape_eval: point outside cell");
  const double s = (p.x - cell.x0) / cell.hx;
  const double t = (p.y - cell.y0) / cell.hy;
  const Hermite1D hs = hermite(s);
  const Hermite1D ht = hermite(t);
  const double ix = 1.0 / cell.hx;
  const double iy = 1.0 / cell.hy;
  ShapeValues out;
  for (int k = 0; k < 4; ++k) {
    const int a = kCornerA[k];
    const int b = kCornerB[k];
    for (int slot = 0; slot < 4; ++slot) {
      const bool slope_x = slot == kDx || slot == kDxy;
      const bool slope_y = slot == kDy || slot == kDxy;
      const int fx = 2 * a + (slope_x ? 1 : 0);
      const int fy = 2 * b + (slope_y ? 1 : 0);
      const double scale = (slope_x ? cell.hx : 1.0) * (slope_y ? cell.hy : 1.0);
      const int i = 4 * k + slot;
      out.value[i] = scale * hs.f[fx] * ht.f[fy];
      out.grad[i] = {scale * ix * hs.d1[fx] * ht.f[fy], scale * iy * hs.f[fx] * ht.d1[fy]};
      out.hess[i] = {scale * ix * ix * hs.d2[fx] * ht.f[fy], scale * ix * iy * hs.d1[fx] * ht.d1[fy],
                     scale * iy * iy * hs.f[fx] * ht.d2[fy]};
    }
  }
  return out;
}

BfsSpace::BfsSpace(RectMesh mesh) : mesh_(std::make_shared<const RectMesh>(std::move(mesh))) {
  const RectMesh& m = *mesh_;
  const int nv = static_cast<int>(m.num_vertices());
  const int ns = 4 * nv;
  free_index_.assign(ns, -1);
  fixed_.assign(ns, false);
  expansion_.assign(ns, {});

  for (int v = 0; v < nv; ++v) {
    if (m.is_hanging(v)) continue;
    const Point2 p = m.vertex(v);
    const bool vertical_side = p.x == 0.0 || p.x == 1.0;
    const bool horizontal_side = p.y == 0.0 || p.y == 1.0;
    if (vertical_side || horizontal_side) {
      fixed_[4 * v + kValue] = true;
      if (horizontal_side) fixed_[4 * v + kDx] = true;
      if (vertical_side) fixed_[4 * v + kDy] = true;
    }
    for (int s = 0; s < 4; ++s) {
      const int slot = 4 * v + s;
      if (!fixed_[slot]) free_index_[slot] = ndof_++;
      expansion_[slot] = {{slot, 1.0}};
    }
  }

  // Hanging slots: 1D Hermite evaluation at the midpoint of the master edge.
  std::vector<bool> done(nv, false);
  for (int v = 0; v < nv; ++v) done[v] = !m.is_hanging(v);
  std::function<void(int)> resolve = [&](int v) {
    if (done[v]) return;
    const HangingInfo& h = *m.hanging(v);
    resolve(h.master_a);
    resolve(h.master_b);
    const int pa = 4 * h.master_a;
    const int pb = 4 * h.master_b;
    const double H = h.length;
    // (value slot, tangential-slope slot) pairs carried along the edge
    const int tan = h.horizontal ? kDx : kDy;
    const int nrm = h.horizontal ? kDy : kDx;
    const std::array<std::pair<int, int>, 2> pairs = {{{kValue, tan}, {nrm, kDxy}}};
    for (const auto& [fs, ds] : pairs) {
      Expansion val;
      axpy(val, expansion_[pa + fs], 0.5);
      axpy(val, expansion_[pb + fs], 0.5);
      axpy(val, expansion_[pa + ds], H / 8.0);
      axpy(val, expansion_[pb + ds], -H / 8.0);
      Expansion der;
      axpy(der, expansion_[pa + fs], -1.5 / H);
      axpy(der, expansion_[pb + fs], 1.5 / H);
      axpy(der, expansion_[pa + ds], -0.25);
      axpy(der, expansion_[pb + ds], -0.25);
      expansion_[4 * v + fs] = compress(std::move(val));
      expansion_[4 * v + ds] = compress(std::move(der));
    }
    done[v] = true;
  };
  for (int v = 0; v < nv; ++v) resolve(v);

  cell_maps_.resize(m.num_cells());
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    CellMap& cm = cell_maps_[c];
    const auto& cv = m.cell_vertices(c);
    for (int k = 0; k < 16; ++k)
      for (const auto& [slot, coef] : expansion_[4 * cv[k / 4] + k % 4]) {
        if (fixed_[slot])
          cm.fixed_slots.push_back(slot);
        else
          cm.dofs.push_back(free_index_[slot]);
      }
    std::sort(cm.dofs.begin(), cm.dofs.end());
    cm.dofs.erase(std::unique(cm.dofs.begin(), cm.dofs.end()), cm.dofs.end());
    std::sort(cm.fixed_slots.begin(), cm.fixed_slots.end());
    cm.fixed_slots.erase(std::unique(cm.fixed_slots.begin(), cm.fixed_slots.end()), cm.fixed_slots.end());
    const std::size_t nd = cm.dofs.size();
    const std::size_t nf = cm.fixed_slots.size();
    cm.C.assign(16 * nd, 0.0);
    cm.D.assign(16 * nf, 0.0);
    for (int k = 0; k < 16; ++k)
      for (const auto& [slot, coef] : expansion_[4 * cv[k / 4] + k % 4]) {
        if (fixed_[slot]) {
          const auto j = std::lower_bound(cm.fixed_slots.begin(), cm.fixed_slots.end(), slot) - cm.fixed_slots.begin();
          cm.D[k * nf + j] += coef;
        } else {
          const auto j = std::lower_bound(cm.dofs.begin(), cm.dofs.end(), free_index_[slot]) - cm.dofs.begin();
          cm.C[k * nd + j] += coef;
        }
      }
  }
}

int BfsSpace::num_fixed() const { return static_cast<int>(std::count(fixed_.begin(), fixed_.end(), true)); }

std::vector<double> BfsSpace::interpolate_boundary(const ScalarField& g) const {
  std::vector<double> out(num_slots(), 0.0);
  const RectMesh& m = *mesh_;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const int base = 4 * static_cast<int>(v);
    if (!fixed_[base + kValue]) continue;
    const Point2 p = m.vertex(v);
    out[base + kValue] = g.value(p);
    if (fixed_[base + kDx] || fixed_[base + kDy]) {
      const Vec2 d = g.gradient(p);
      if (fixed_[base + kDx]) out[base + kDx] = d.x;
      if (fixed_[base + kDy]) out[base + kDy] = d.y;
    }
  }
  return out;
}

FeFunction::FeFunction(std::shared_ptr<const BfsSpace> space, std::vector<double> free, std::vector<double> fixed)
    : space_(std::move(space)), free_(std::move(free)), fixed_(std::move(fixed)) {
  const BfsSpace& S = *space_;
  if (static_cast<int>(free_.size()) != S.ndof() || static_cast<int>(fixed_.size()) != S.num_slots())
    throw std::invalid_argument("FeFunction: coefficient size mismatch");
  slots_.assign(S.num_slots(), 0.0);
  for (int s = 0; s < S.num_slots(); ++s) {
    double acc = 0.0;
    for (const auto& [p, c] : S.expansion(s)) acc += c * (S.is_fixed(p) ? fixed_[p] : free_[S.free_index(p)]);
    slots_[s] = acc;
  }
}

FeFunction FeFunction::interpolate(std::shared_ptr<const BfsSpace> space, const ScalarField& u) {
  const BfsSpace& S = *space;
  const RectMesh& m = S.mesh();
  std::vector<double> free(S.ndof(), 0.0);
  std::vector<double> fixed(S.num_slots(), 0.0);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (m.is_hanging(v)) continue;
    const Point2 p = m.vertex(v);
    const Vec2 d = u.gradient(p);
    const std::array<double, 4> data = {u.value(p), d.x, d.y, u.hessian(p).m12};
    for (int s = 0; s < 4; ++s) {
      const int slot = 4 * static_cast<int>(v) + s;
      if (S.is_fixed(slot))
        fixed[slot] = data[s];
      else
        free[S.free_index(slot)] = data[s];
    }
  }
  return FeFunction(std::move(space), std::move(free), std::move(fixed));
}

std::array<double, 16> FeFunction::local_coefficients(std::size_t cell) const {
  const auto& cv = space_->mesh().cell_vertices(cell);
  std::array<double, 16> out{};
  for (int k = 0; k < 16; ++k) out[k] = slots_[4 * cv[k / 4] + k % 4];
  return out;
}

FeFunction::Jet FeFunction::eval_in_cell(std::size_t cell, Point2 p) const {
  const ShapeValues sv = shape_eval(space_->mesh().rect(cell), p);
  const auto coef = local_coefficients(cell);
  Jet j{0.0, {}, {}};
  for (int k = 0; k < 16; ++k) {
    j.value += coef[k] * sv.value[k];
    j.grad.x += coef[k] * sv.grad[k].x;
    j.grad.y += coef[k] * sv.grad[k].y;
    j.hess = j.hess + coef[k] * sv.hess[k];
  }
  return j;
}

double FeFunction::value(Point2 p) const { return eval_in_cell(space_->mesh().locate(p), p).value; }
Vec2 FeFunction::gradient(Point2 p) const { return eval_in_cell(space_->mesh().locate(p), p).grad; }
SymMat2 FeFunction::hessian(Point2 p) const { return eval_in_cell(space_->mesh().locate(p), p).hess; }

}  // namespace macert
