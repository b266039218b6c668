#pragma once

// Reference values frozen from tests/oracles/symbolic_integrals.py (exact
// sympy integration), plus the analytic fields they belong to.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "hflow/config.hpp"
#include "hflow/grid.hpp"

namespace oracle {

constexpr double pi = std::numbers::pi;

// u = (x, y, xy): A = int |grad u|^2, B = int u . u_x ^ u_y
constexpr double kPolyA = 8.0 / 3.0;
constexpr double kPolyB = -0.25;

// u = [16 x(1-x) y(1-y)]^2 (x, y, xy)
constexpr double kCutoffPolyA = 3014656.0 / 1091475.0;  // 2.7620018781923544
constexpr double kCutoffPolyB = -262144.0 / 9018009.0;  // -0.029068944153859239

// u = (sin pi x sin pi y, sin 2pi x sin pi y, sin pi x sin 2pi y)
const double kMixedA = 3.0 * pi * pi;
const double kMixedB = 9.0 * pi * pi / 16.0;

// int_0^1 int_0^1 sin(pi x) sin(pi y)
const double kSinIntegral = 4.0 / (pi * pi);

// Sphere of radius 1/H realised by the bubble limit: A = 8 pi / H^2,
// B = H int u . u_x ^ u_y = -4 pi / H^2, so A^3 / (24 B^2) = 4 pi / (3 H^2).
inline double sphere_depth(double H) { return 4.0 * pi / (3.0 * H * H); }

inline hflow::Vec3 poly(double x, double y) { return {x, y, x * y}; }

inline hflow::Vec3 cutoff_poly(double x, double y) {
  const double p = 16.0 * x * (1.0 - x) * y * (1.0 - y);
  const double c = p * p;
  return {c * x, c * y, c * x * y};
}

inline hflow::Vec3 mixed(double x, double y) {
  const double sx = std::sin(pi * x), sy = std::sin(pi * y);
  return {sx * sy, std::sin(2.0 * pi * x) * sy, sx * std::sin(2.0 * pi * y)};
}

inline std::filesystem::path preset(const std::string& name) {
  return std::filesystem::path(HFLOW_PRESETS_DIR) / (name + ".json");
}

inline hflow::ExperimentConfig load_preset(const std::string& name) {
  return hflow::parse_config(hflow::read_json_file(preset(name)));
}

}  // namespace oracle
