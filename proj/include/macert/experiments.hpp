#pragma once

#include <functional>
#include <string>

#include "macert/bfs_space.hpp"

namespace macert {

/// Benchmark problem with known solution u on the unit square. The right-hand
/// side is given in the HJB scaling det D^2 u = (f/2)^2.
struct Experiment {
  int id = 0;
  std::string name;
  ScalarField u;
  std::function<double(Point2)> f;
  ScalarField g;
  double default_epsilon = 1e-3;
};

/// 1: u = (2|x|)^{3/2}/3, f = 2|x|^{-1/2}, singular at the origin.
/// 2: u = |x - 1/2|, f = 0; the Hessian is taken as 0 (piecewise).
/// 3: u = -(1/sin(pi x) + 1/sin(pi y))^{-1}, g = 0.
/// Throws std::invalid_argument for other ids.
[[nodiscard]] Experiment make_experiment(int id);

}  // namespace macert
