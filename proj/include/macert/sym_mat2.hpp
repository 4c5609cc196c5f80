#pragma once

#include <array>
#include <cmath>

namespace macert {

/// Symmetric 2x2 matrix [[m11, m12], [m12, m22]].
struct SymMat2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;

  static SymMat2 diag(double a, double b) { return {a, 0.0, b}; }
  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  /// Q diag(mu1, mu2) Q^T with Q's first column (cos th, sin th).
  static SymMat2 from_eigen(double mu1, double mu2, double theta);

  [[nodiscard]] double trace() const { return m11 + m22; }
  [[nodiscard]] double det() const { return m11 * m22 - m12 * m12; }
  [[nodiscard]] double frobenius() const { return std::sqrt(m11 * m11 + 2.0 * m12 * m12 + m22 * m22); }
  /// A : B
  [[nodiscard]] double dot(const SymMat2& o) const { return m11 * o.m11 + 2.0 * m12 * o.m12 + m22 * o.m22; }

  struct Eigen {
    double mu1;  // smaller eigenvalue
    double mu2;
    double c;  // (c, s) is a unit eigenvector for mu1
    double s;
  };
  [[nodiscard]] Eigen eigen() const;
  [[nodiscard]] bool is_psd(double rel_tol) const;

  friend SymMat2 operator+(const SymMat2& a, const SymMat2& b) { return {a.m11 + b.m11, a.m12 + b.m12, a.m22 + b.m22}; }
  friend SymMat2 operator-(const SymMat2& a, const SymMat2& b) { return {a.m11 - b.m11, a.m12 - b.m12, a.m22 - b.m22}; }
  friend SymMat2 operator*(double k, const SymMat2& a) { return {k * a.m11, k * a.m12, k * a.m22}; }
};

inline SymMat2 SymMat2::from_eigen(double mu1, double mu2, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {mu1 * c * c + mu2 * s * s, (mu1 - mu2) * c * s, mu1 * s * s + mu2 * c * c};
}

inline SymMat2::Eigen SymMat2::eigen() const {
  const double mean = 0.5 * (m11 + m22);
  const double half_diff = 0.5 * (m11 - m22);
  const double r = std::hypot(half_diff, m12);
  Eigen e{mean - r, mean + r, 1.0, 0.0};
  if (r == 0.0) return e;
  // Eigenvector of the smaller eigenvalue, built from the better-conditioned row.
  if (half_diff <= 0.0) {
    // m11 <= m22: vector close to e1
    const double vx = r - half_diff;
    const double vy = -m12;
    const double n = std::hypot(vx, vy);
    e.c = vx / n;
    e.s = vy / n;
  } else {
    const double vx = -m12;
    const double vy = r + half_diff;
    const double n = std::hypot(vx, vy);
    e.c = vx / n;
    e.s = vy / n;
  }
  return e;
}

inline bool SymMat2::is_psd(double rel_tol) const { return eigen().mu1 >= -rel_tol * frobenius(); }

}  // namespace macert
