#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "macert/geometry.hpp"
#include "macert/sym_mat2.hpp"

namespace macert {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Scalar field with first and second derivatives. Derivative callbacks may
/// be empty when a caller never needs them.
struct ScalarField {
  std::function<double(Point2)> value;
  std::function<Vec2(Point2)> gradient;
  std::function<SymMat2(Point2)> hessian;
};

/// Local vertex slot order: value, d/dx, d/dy, d^2/dxdy.
enum Slot : int { kValue = 0, kDx = 1, kDy = 2, kDxy = 3 };

/// The 16 Hermite bicubic shape functions of one rectangle. Local index is
/// 4 * corner + slot, corners ordered as RectMesh::cell_vertices.
struct ShapeValues {
  std::array<double, 16> value{};
  std::array<Vec2, 16> grad{};
  std::array<SymMat2, 16> hess{};
};

[[nodiscard]] ShapeValues shape_eval(const Rect& cell, Point2 p);

/// Bogner-Fox-Schmit space on a RectMesh with Dirichlet trace data imposed
/// strongly (value and tangential derivative at boundary vertices).
///
/// Every vertex carries four slots. Slots of hanging vertices are affine
/// images of the slots on their master edge; the remaining primary slots are
/// either free unknowns or fixed by boundary data.
class BfsSpace {
 public:
  explicit BfsSpace(RectMesh mesh);

  [[nodiscard]] const RectMesh& mesh() const { return *mesh_; }
  [[nodiscard]] int ndof() const { return ndof_; }
  [[nodiscard]] int num_slots() const { return static_cast<int>(free_index_.size()); }

  /// Index into the unknown vector, or -1 for fixed and constrained slots.
  [[nodiscard]] int free_index(int slot) const { return free_index_[slot]; }
  [[nodiscard]] bool is_fixed(int slot) const { return fixed_[slot]; }
  /// Expansion of a slot as a combination of primary slots.
  [[nodiscard]] const std::vector<std::pair<int, double>>& expansion(int slot) const { return expansion_[slot]; }

  /// Per cell: local coefficient k = sum_j C(k, j) * u[dofs[j]] + sum_i D(k, i) * fixed[fixed_slots[i]].
  struct CellMap {
    std::vector<int> dofs;
    std::vector<double> C;  // 16 x dofs.size(), row major
    std::vector<int> fixed_slots;
    std::vector<double> D;  // 16 x fixed_slots.size(), row major
  };
  [[nodiscard]] const CellMap& cell_map(std::size_t c) const { return cell_maps_[c]; }

  /// Fixed-slot values from boundary data g (slots that are not fixed stay 0).
  [[nodiscard]] std::vector<double> interpolate_boundary(const ScalarField& g) const;

  /// Number of fixed primary slots.
  [[nodiscard]] int num_fixed() const;

 private:
  std::shared_ptr<const RectMesh> mesh_;
  int ndof_ = 0;
  std::vector<int> free_index_;
  std::vector<bool> fixed_;
  std::vector<std::vector<std::pair<int, double>>> expansion_;
  std::vector<CellMap> cell_maps_;
};

/// Member of a BfsSpace: free coefficients plus the fixed boundary values.
class FeFunction {
 public:
  FeFunction(std::shared_ptr<const BfsSpace> space, std::vector<double> free, std::vector<double> fixed);

  /// Hermite interpolant of u: primary slots take nodal data from u, hanging
  /// slots follow their constraints.
  static FeFunction interpolate(std::shared_ptr<const BfsSpace> space, const ScalarField& u);

  [[nodiscard]] const BfsSpace& space() const { return *space_; }
  [[nodiscard]] const std::shared_ptr<const BfsSpace>& space_ptr() const { return space_; }
  [[nodiscard]] const std::vector<double>& free_values() const { return free_; }
  [[nodiscard]] const std::vector<double>& fixed_values() const { return fixed_; }
  /// Full slot vector consistent with the hanging-node constraints.
  [[nodiscard]] const std::vector<double>& slot_values() const { return slots_; }

  [[nodiscard]] std::array<double, 16> local_coefficients(std::size_t cell) const;

  [[nodiscard]] double value(Point2 p) const;
  [[nodiscard]] Vec2 gradient(Point2 p) const;
  [[nodiscard]] SymMat2 hessian(Point2 p) const;

  struct Jet {
    double value;
    Vec2 grad;
    SymMat2 hess;
  };
  /// Value and derivatives of the restriction to a given cell.
  [[nodiscard]] Jet eval_in_cell(std::size_t cell, Point2 p) const;

 private:
  std::shared_ptr<const BfsSpace> space_;
  std::vector<double> free_;
  std::vector<double> fixed_;
  std::vector<double> slots_;
};

}  // namespace macert
