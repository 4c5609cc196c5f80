#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace macert {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Stable identifier of a dyadic square: refinement level plus integer
/// position on the level grid. Children of (l, i, j) are (l+1, 2i+a, 2j+b),
/// so an id survives any refinement that does not split the cell itself.
struct CellId {
  std::uint32_t level = 0;
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;

  [[nodiscard]] std::uint64_t key() const {
    return (std::uint64_t{level} << 58) | (std::uint64_t{ix} << 29) | std::uint64_t{iy};
  }
  [[nodiscard]] CellId parent() const { return {level - 1, ix / 2, iy / 2}; }
  [[nodiscard]] CellId child(int a, int b) const {
    return {level + 1, 2 * ix + static_cast<std::uint32_t>(a), 2 * iy + static_cast<std::uint32_t>(b)};
  }

  friend bool operator==(const CellId&, const CellId&) = default;
  friend bool operator<(const CellId& a, const CellId& b) { return a.key() < b.key(); }
};

/// Axis-aligned rectangle [x0, x0+hx] x [y0, y0+hy].
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 1.0;
  double hy = 1.0;
  int level = 0;

  [[nodiscard]] double area() const { return hx * hy; }
  [[nodiscard]] double diameter() const;
  [[nodiscard]] bool contains(Point2 p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x0 + hx + tol && p.y >= y0 - tol && p.y <= y0 + hy + tol;
  }
  [[nodiscard]] bool empty() const { return hx <= 0.0 || hy <= 0.0; }
};

enum class Side : int { Bottom = 0, Right = 1, Top = 2, Left = 3 };

/// Cell edge on the outer boundary of the unit square.
struct BoundaryEdge {
  int cell = -1;
  Side side = Side::Bottom;
  Point2 a;
  Point2 b;
  [[nodiscard]] double length() const;
};

/// A vertex sitting at the midpoint of a coarser neighbour's edge. Its trace
/// data is determined by the two endpoints of that edge.
struct HangingInfo {
  int master_a = -1;  // endpoint with the smaller coordinate along the edge
  int master_b = -1;
  bool horizontal = true;  // master edge parallel to the x axis
  double length = 0.0;     // length of the master edge
};

/// Leaf partition of [0,1]^2 into dyadic squares with 1-irregular hanging
/// vertices. Values are immutable: refine() returns a new mesh.
class RectMesh {
 public:
  /// Finest representable level; integer vertex coordinates use 2^kMaxLevel units.
  static constexpr int kMaxLevel = 28;

  [[nodiscard]] std::size_t num_cells() const { return cells_.size(); }
  [[nodiscard]] const std::vector<CellId>& cell_ids() const { return cells_; }
  [[nodiscard]] const Rect& rect(std::size_t c) const { return rects_[c]; }
  [[nodiscard]] const std::vector<Rect>& rects() const { return rects_; }
  [[nodiscard]] std::optional<int> find_cell(CellId id) const;

  [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
  [[nodiscard]] Point2 vertex(std::size_t v) const { return vertices_[v]; }
  /// Corner vertex ids of a cell in the order (x0,y0), (x1,y0), (x0,y1), (x1,y1).
  [[nodiscard]] const std::array<int, 4>& cell_vertices(std::size_t c) const { return cell_vertices_[c]; }
  [[nodiscard]] bool is_hanging(std::size_t v) const { return hanging_[v].has_value(); }
  [[nodiscard]] const std::optional<HangingInfo>& hanging(std::size_t v) const { return hanging_[v]; }
  [[nodiscard]] bool on_boundary(std::size_t v) const;

  [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  /// Leaf containing p; points on shared edges go to the cell on the upper/right side
  /// except on the outer boundary x = 1 or y = 1.
  [[nodiscard]] int locate(Point2 p) const;

  [[nodiscard]] double min_edge_length() const;
  [[nodiscard]] double max_diameter() const;
  [[nodiscard]] int max_level() const;

  /// Every pair of edge-adjacent leaves differs by at most one level.
  [[nodiscard]] bool is_one_irregular() const;

  static RectMesh init_uniform(int levels);
  static RectMesh from_leaves(std::vector<CellId> leaves);

  /// Splits every marked cell into four children and closes the result
  /// under the 1-irregularity rule.
  [[nodiscard]] RectMesh refine(const std::vector<int>& marked) const;
  [[nodiscard]] RectMesh refine_all() const;

 private:
  [[nodiscard]] std::optional<CellId> leaf_covering(CellId id) const;
  void build();

  std::vector<CellId> cells_;
  std::vector<Rect> rects_;
  std::unordered_map<std::uint64_t, int> nodes_;  // key -> leaf index, or -1 for refined nodes

  std::vector<Point2> vertices_;
  std::vector<std::uint64_t> vertex_keys_;
  std::vector<std::array<int, 4>> cell_vertices_;
  std::vector<std::optional<HangingInfo>> hanging_;
  std::vector<BoundaryEdge> boundary_edges_;
};

/// Interior subdomain {x : dist(x, boundary) >= j * delta} of the unit square.
struct InteriorBand {
  int j = 0;
  double delta = 1.0;

  [[nodiscard]] double offset() const { return j * delta; }
  [[nodiscard]] bool valid() const { return j >= 0 && delta > 0.0 && offset() < 0.5; }
  [[nodiscard]] bool contains(Point2 p) const { return boundary_distance(p) >= offset(); }
  [[nodiscard]] Rect region() const;

  static double boundary_distance(Point2 p);
};

/// Intersection of a cell with the band region (possibly empty).
struct BandPiece {
  double measure = 0.0;
  Rect clip;
};

[[nodiscard]] BandPiece band_split(const Rect& cell, const InteriorBand& band);

}  // namespace macert
