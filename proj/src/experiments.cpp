#include "macert/experiments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace macert {

namespace {

constexpr double kPi = std::numbers::pi;

Experiment corner_singular() {
  Experiment e;
  e.id = 1;
  e.name = "corner";
  e.u.value = [](Point2 p) { return std::pow(2.0 * std::hypot(p.x, p.y), 1.5) / 3.0; };
  e.u.gradient = [](Point2 p) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return Vec2{};
    const double k = std::sqrt(2.0 / r);
    return Vec2{k * p.x, k * p.y};
  };
  e.u.hessian = [](Point2 p) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return SymMat2{};
    const double a = std::sqrt(2.0 / r);
    const double b = 0.5 * a / (r * r);
    return SymMat2{a - b * p.x * p.x, -b * p.x * p.y, a - b * p.y * p.y};
  };
  e.f = [](Point2 p) { return 2.0 / std::sqrt(std::hypot(p.x, p.y)); };
  e.g = e.u;
  e.default_epsilon = 1e-3;
  return e;
}

Experiment kink() {
  Experiment e;
  e.id = 2;
  e.name = "kink";
  e.u.value = [](Point2 p) { return std::abs(p.x - 0.5); };
  e.u.gradient = [](Point2 p) {
    const double d = p.x - 0.5;
    return Vec2{d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0), 0.0};
  };
  e.u.hessian = [](Point2) { return SymMat2{}; };
  e.f = [](Point2) { return 0.0; };
  e.g = e.u;
  e.default_epsilon = 1e-3;
  return e;
}

Experiment harmonic_sine() {
  Experiment e;
  e.id = 3;
  e.name = "sine";
  // u = -s t / (s + t) with s = sin(pi x), t = sin(pi y)
  e.u.value = [](Point2 p) {
    const double s = std::sin(kPi * p.x);
    const double t = std::sin(kPi * p.y);
    const double P = s + t;
    return P > 0.0 ? -s * t / P : 0.0;
  };
  e.u.gradient = [](Point2 p) {
    const double s = std::sin(kPi * p.x);
    const double t = std::sin(kPi * p.y);
    const double P = s + t;
    if (P <= 0.0) return Vec2{};
    const double sx = kPi * std::cos(kPi * p.x);
    const double ty = kPi * std::cos(kPi * p.y);
    return Vec2{-sx * t * t / (P * P), -ty * s * s / (P * P)};
  };
  e.u.hessian = [](Point2 p) {
    const double s = std::sin(kPi * p.x);
    const double t = std::sin(kPi * p.y);
    const double P = s + t;
    if (P <= 0.0) return SymMat2{};
    const double sx = kPi * std::cos(kPi * p.x);
    const double ty = kPi * std::cos(kPi * p.y);
    const double sxx = -kPi * kPi * s;
    const double tyy = -kPi * kPi * t;
    const double P2 = P * P;
    const double P3 = P2 * P;
    return SymMat2{-sxx * t * t / P2 + 2.0 * sx * sx * t * t / P3, -2.0 * sx * ty * s * t / P3,
                   -tyy * s * s / P2 + 2.0 * ty * ty * s * s / P3};
  };
  e.f = [](Point2 p) {
    const double s = std::sin(kPi * p.x);
    const double t = std::sin(kPi * p.y);
    const double P = s + t;
    return 2.0 * kPi * kPi * s * t * std::sqrt(2.0 - s * t) / (P * P);
  };
  e.g.value = [](Point2) { return 0.0; };
  e.g.gradient = [](Point2) { return Vec2{}; };
  e.g.hessian = [](Point2) { return SymMat2{}; };
  e.default_epsilon = 1e-4;
  return e;
}

}  // namespace

Experiment make_experiment(int id) {
  switch (id) {
    case 1:
      return corner_singular();
    case 2:
      return kink();
    case 3:
      return harmonic_sine();
    default:
      throw std::invalid_argument("unknown experiment id " + std::to_string(id));
  }
}

}  // namespace macert
