#pragma once

// Brute-force convex envelope of scattered data: the maximum over all
// supporting planes through three data points that lie below every datum.
// O(n^4); meant for clouds of at most ~100 points.

#include <cmath>
#include <limits>
#include <vector>

#include "macert/geometry.hpp"

namespace macert::oracle {

struct SupportPlane {
  double a, b, c;  // z = a x + b y + c
};

inline std::vector<SupportPlane> supporting_planes(const std::vector<Point2>& xy, const std::vector<double>& z,
                                                   double tol = 1e-12) {
  std::vector<SupportPlane> out;
  const std::size_t n = xy.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double x1 = xy[j].x - xy[i].x, y1 = xy[j].y - xy[i].y, z1 = z[j] - z[i];
        const double x2 = xy[k].x - xy[i].x, y2 = xy[k].y - xy[i].y, z2 = z[k] - z[i];
        const double det = x1 * y2 - x2 * y1;
        if (std::abs(det) < 1e-12) continue;
        const double a = (z1 * y2 - z2 * y1) / det;
        const double b = (x1 * z2 - x2 * z1) / det;
        const double c = z[i] - a * xy[i].x - b * xy[i].y;
        bool below = true;
        for (std::size_t m = 0; m < n && below; ++m) below = a * xy[m].x + b * xy[m].y + c <= z[m] + tol;
        if (below) out.push_back({a, b, c});
      }
  return out;
}

inline double envelope_at(const std::vector<SupportPlane>& planes, Point2 p) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : planes) best = std::max(best, s.a * p.x + s.b * p.y + s.c);
  return best;
}

}  // namespace macert::oracle
