#include "macert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <stdexcept>
#include <unordered_set>

namespace macert {

namespace {

constexpr std::int64_t kUnit = std::int64_t{1} << RectMesh::kMaxLevel;

std::uint64_t vertex_key(std::int64_t X, std::int64_t Y) {
  return (static_cast<std::uint64_t>(X) << 32) | static_cast<std::uint64_t>(Y);
}

double to_coord(std::int64_t X) { return static_cast<double>(X) / static_cast<double>(kUnit); }

std::int64_t side_units(std::uint32_t level) { return kUnit >> level; }

bool in_domain(std::int64_t ix, std::int64_t iy, std::uint32_t level) {
  const std::int64_t n = std::int64_t{1} << level;
  return ix >= 0 && iy >= 0 && ix < n && iy < n;
}

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {-1, 0, 1, 0};

}  // namespace

double Rect::diameter() const { return std::hypot(hx, hy); }

double BoundaryEdge::length() const { return std::hypot(b.x - a.x, b.y - a.y); }

std::optional<int> RectMesh::find_cell(CellId id) const {
  auto it = nodes_.find(id.key());
  if (it == nodes_.end() || it->second < 0) return std::nullopt;
  return it->second;
}

std::optional<CellId> RectMesh::leaf_covering(CellId id) const {
  for (CellId c = id;; c = c.parent()) {
    auto it = nodes_.find(c.key());
    if (it != nodes_.end()) {
      if (it->second >= 0) return c;
      return std::nullopt;  // id lies inside a refined node but is not itself a leaf
    }
    if (c.level == 0) return std::nullopt;
  }
}

bool RectMesh::on_boundary(std::size_t v) const {
  const Point2 p = vertices_[v];
  return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

int RectMesh::locate(Point2 p) const {
  const double fx = std::clamp(p.x, 0.0, 1.0) * static_cast<double>(kUnit);
  const double fy = std::clamp(p.y, 0.0, 1.0) * static_cast<double>(kUnit);
  const auto X = std::min<std::int64_t>(static_cast<std::int64_t>(fx), kUnit - 1);
  const auto Y = std::min<std::int64_t>(static_cast<std::int64_t>(fy), kUnit - 1);
  for (std::uint32_t l = 0; l <= kMaxLevel; ++l) {
    const int shift = kMaxLevel - static_cast<int>(l);
    CellId id{l, static_cast<std::uint32_t>(X >> shift), static_cast<std::uint32_t>(Y >> shift)};
    auto it = nodes_.find(id.key());
    if (it == nodes_.end()) break;
    if (it->second >= 0) return it->second;
  }
  throw std::logic_error("RectMesh::locate: point not covered");
}

double RectMesh::min_edge_length() const { return std::ldexp(1.0, -max_level()); }

double RectMesh::max_diameter() const {
  std::uint32_t lmin = cells_.front().level;
  for (const auto& c : cells_) lmin = std::min(lmin, c.level);
  return std::sqrt(2.0) * std::ldexp(1.0, -static_cast<int>(lmin));
}

int RectMesh::max_level() const {
  std::uint32_t lmax = 0;
  for (const auto& c : cells_) lmax = std::max(lmax, c.level);
  return static_cast<int>(lmax);
}

bool RectMesh::is_one_irregular() const {
  for (const auto& c : cells_) {
    for (int d = 0; d < 4; ++d) {
      const std::int64_t nx = std::int64_t{c.ix} + kDx[d];
      const std::int64_t ny = std::int64_t{c.iy} + kDy[d];
      if (!in_domain(nx, ny, c.level)) continue;
      CellId n{c.level, static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny)};
      auto leaf = leaf_covering(n);
      if (leaf && leaf->level + 1 < c.level) return false;
    }
  }
  return true;
}

RectMesh RectMesh::init_uniform(int levels) {
  if (levels < 0 || levels > kMaxLevel) throw std::invalid_argument("init_uniform: bad level");
  const auto l = static_cast<std::uint32_t>(levels);
  const std::uint32_t n = 1u << l;
  std::vector<CellId> leaves;
  leaves.reserve(std::size_t{n} * n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) leaves.push_back({l, i, j});
  return from_leaves(std::move(leaves));
}

RectMesh RectMesh::from_leaves(std::vector<CellId> leaves) {
  RectMesh m;
  std::sort(leaves.begin(), leaves.end());
  m.cells_ = std::move(leaves);
  m.build();
  return m;
}

void RectMesh::build() {
  nodes_.clear();
  rects_.clear();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const CellId c = cells_[i];
    nodes_[c.key()] = static_cast<int>(i);
    for (CellId a = c; a.level > 0;) {
      a = a.parent();
      auto [it, inserted] = nodes_.try_emplace(a.key(), -1);
      if (!inserted) break;
    }
    const double h = std::ldexp(1.0, -static_cast<int>(c.level));
    rects_.push_back({c.ix * h, c.iy * h, h, h, static_cast<int>(c.level)});
  }

  std::unordered_map<std::uint64_t, int> vindex;
  vertices_.clear();
  vertex_keys_.clear();
  cell_vertices_.assign(cells_.size(), {});
  auto add_vertex = [&](std::int64_t X, std::int64_t Y) {
    const auto key = vertex_key(X, Y);
    auto [it, inserted] = vindex.try_emplace(key, static_cast<int>(vertices_.size()));
    if (inserted) {
      vertices_.push_back({to_coord(X), to_coord(Y)});
      vertex_keys_.push_back(key);
    }
    return it->second;
  };
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const CellId c = cells_[i];
    const std::int64_t s = side_units(c.level);
    const std::int64_t X = c.ix * s;
    const std::int64_t Y = c.iy * s;
    cell_vertices_[i] = {add_vertex(X, Y), add_vertex(X + s, Y), add_vertex(X, Y + s), add_vertex(X + s, Y + s)};
  }

  // A vertex at the midpoint of some leaf edge hangs on that edge.
  hanging_.assign(vertices_.size(), std::nullopt);
  boundary_edges_.clear();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const CellId c = cells_[i];
    const std::int64_t s = side_units(c.level);
    const std::int64_t X = c.ix * s;
    const std::int64_t Y = c.iy * s;
    const auto& cv = cell_vertices_[i];
    // (side, endpoint a, endpoint b, horizontal)
    const std::array<std::tuple<Side, int, int, bool>, 4> edges = {{
        {Side::Bottom, cv[0], cv[1], true},
        {Side::Right, cv[1], cv[3], false},
        {Side::Top, cv[2], cv[3], true},
        {Side::Left, cv[0], cv[2], false},
    }};
    const std::array<std::pair<std::int64_t, std::int64_t>, 4> mids = {{
        {X + s / 2, Y}, {X + s, Y + s / 2}, {X + s / 2, Y + s}, {X, Y + s / 2}}};
    for (int e = 0; e < 4; ++e) {
      const auto [side, a, b, horiz] = edges[e];
      if (s >= 2) {
        auto it = vindex.find(vertex_key(mids[e].first, mids[e].second));
        if (it != vindex.end()) hanging_[it->second] = HangingInfo{a, b, horiz, rects_[i].hx};
      }
      const bool boundary = (side == Side::Bottom && Y == 0) || (side == Side::Top && Y + s == kUnit) ||
                            (side == Side::Left && X == 0) || (side == Side::Right && X + s == kUnit);
      if (boundary) boundary_edges_.push_back({static_cast<int>(i), side, vertices_[a], vertices_[b]});
    }
  }
}

RectMesh RectMesh::refine(const std::vector<int>& marked) const {
  std::unordered_set<std::uint64_t> leaves;
  std::unordered_set<std::uint64_t> internal;
  for (const auto& c : cells_) leaves.insert(c.key());
  for (const auto& [k, v] : nodes_)
    if (v < 0) internal.insert(k);

  auto covering = [&](CellId id) -> std::optional<CellId> {
    for (CellId c = id;; c = c.parent()) {
      if (leaves.count(c.key())) return c;
      if (internal.count(c.key())) return std::nullopt;
      if (c.level == 0) return std::nullopt;
    }
  };

  std::function<void(CellId)> split = [&](CellId c) {
    if (!leaves.count(c.key())) return;
    if (static_cast<int>(c.level) >= kMaxLevel) throw std::length_error("refine: maximum level reached");
    // Coarser edge neighbours must first reach this cell's level.
    for (int d = 0; d < 4; ++d) {
      const std::int64_t nx = std::int64_t{c.ix} + kDx[d];
      const std::int64_t ny = std::int64_t{c.iy} + kDy[d];
      if (!in_domain(nx, ny, c.level)) continue;
      auto leaf = covering({c.level, static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny)});
      if (leaf && leaf->level < c.level) split(*leaf);
    }
    leaves.erase(c.key());
    internal.insert(c.key());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) leaves.insert(c.child(a, b).key());
  };

  for (int idx : marked) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= cells_.size()) throw std::out_of_range("refine: bad cell index");
    split(cells_[idx]);
  }

  std::vector<CellId> out;
  out.reserve(leaves.size());
  for (auto k : leaves) {
    out.push_back({static_cast<std::uint32_t>(k >> 58), static_cast<std::uint32_t>((k >> 29) & ((1u << 29) - 1)),
                   static_cast<std::uint32_t>(k & ((1u << 29) - 1))});
  }
  return from_leaves(std::move(out));
}

RectMesh RectMesh::refine_all() const {
  std::vector<int> all(cells_.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return refine(all);
}

Rect InteriorBand::region() const {
  const double o = offset();
  return {o, o, 1.0 - 2.0 * o, 1.0 - 2.0 * o, 0};
}

double InteriorBand::boundary_distance(Point2 p) { return std::min({p.x, 1.0 - p.x, p.y, 1.0 - p.y}); }

BandPiece band_split(const Rect& cell, const InteriorBand& band) {
  const double o = band.offset();
  const double x0 = std::max(cell.x0, o);
  const double x1 = std::min(cell.x0 + cell.hx, 1.0 - o);
  const double y0 = std::max(cell.y0, o);
  const double y1 = std::min(cell.y0 + cell.hy, 1.0 - o);
  BandPiece piece;
  if (x1 <= x0 || y1 <= y0) {
    piece.clip = {x0, y0, 0.0, 0.0, cell.level};
    return piece;
  }
  piece.clip = {x0, y0, x1 - x0, y1 - y0, cell.level};
  piece.measure = piece.clip.area();
  return piece;
}

}  // namespace macert
