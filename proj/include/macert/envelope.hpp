#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "macert/bfs_space.hpp"
#include "macert/quadrature.hpp"

namespace macert {

/// Point cloud V = N ∪ N^b: quadrature points of every cell (interior, with
/// owning cell and weight) followed by boundary points. Boundary points run
/// counterclockwise around the square starting at the origin; the corners are
/// included and the loop is closed implicitly.
struct SampleSet {
  std::vector<Point2> points;
  std::size_t num_interior = 0;
  std::vector<int> cell;        // per interior point
  std::vector<double> weight;   // per interior point

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] std::size_t num_boundary() const { return points.size() - num_interior; }
};

/// boundary_density is the number of points per unit length on each side
/// (rounded up to whole subdivisions). Throws std::invalid_argument unless > 0.
[[nodiscard]] SampleSet build_samples(const RectMesh& mesh, const QuadRule& quad, double boundary_density);

/// Same interior points; every boundary edge of the mesh is split into
/// per_edge equal parts, so the boundary spacing follows the local mesh size.
[[nodiscard]] SampleSet build_samples_graded(const RectMesh& mesh, const QuadRule& quad, int per_edge = 4);

/// Lower convex hull of lifted points (x, y, z) built by 3D quickhull with
/// exact orientation predicates and an auxiliary apex above the cloud. Evaluates the convex envelope Γ of the
/// data on the convex hull of the xy points.
class LowerHull {
 public:
  /// Throws std::invalid_argument if sizes differ or the xy points are
  /// collinear (fewer than 3 affinely independent points).
  LowerHull(std::vector<Point2> xy, std::vector<double> z);

  [[nodiscard]] double operator()(Point2 p) const;

  /// z_i - Γ(x_i) >= 0 up to roundoff.
  [[nodiscard]] double gap(std::size_t i) const { return z_[i] - (*this)(xy_[i]); }

  [[nodiscard]] const std::vector<std::array<int, 3>>& facets() const { return facets_; }
  [[nodiscard]] const std::vector<Point2>& points() const { return xy_; }
  [[nodiscard]] const std::vector<double>& values() const { return z_; }
  /// max |z| + 1, the scale used for vertical tolerances
  [[nodiscard]] double scale() const { return scale_; }

 private:
  std::vector<Point2> xy_;
  std::vector<double> z_;
  double scale_ = 1.0;
  std::vector<std::array<int, 3>> facets_;
  // bucket grid over the xy bounding box; each bucket lists overlapping facets
  double x0_ = 0, y0_ = 0, bw_ = 1, bh_ = 1;
  int nbx_ = 1, nby_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Hull of the nodal values I v_h at the sample points.
[[nodiscard]] LowerHull envelope_hull(const FeFunction& vh, const SampleSet& samples);

/// Per interior sample: lifted point lies on the hull (vertical gap
/// <= gap_tol * scale) and D²v_h is positive semidefinite (eigenvalues
/// >= -psd_tol * |D²v_h|).
[[nodiscard]] std::vector<bool> contact_set(const LowerHull& hull, const FeFunction& vh, const SampleSet& samples,
                                            double gap_tol = 1e-10, double psd_tol = 1e-12);

/// max |g - Γ| over the boundary samples and the midpoints between neighbours.
[[nodiscard]] double boundary_residual(const LowerHull& hull, const ScalarField& g, const SampleSet& samples);

/// Triangulation of the samples (lower hull of a perturbed paraboloid lift).
[[nodiscard]] std::vector<std::array<int, 3>> sample_triangulation(const SampleSet& samples);

/// Sampled sup |v_h - I v_h| with I the piecewise linear interpolant on the
/// sample triangulation; each triangle is probed at the barycentric lattice
/// of step 1/k.
[[nodiscard]] double envelope_gap(const FeFunction& vh, const SampleSet& samples, int k = 4);

}  // namespace macert
