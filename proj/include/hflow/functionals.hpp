#pragma once

// Energy, volume and Nehari-type functionals of the constant-H system
//
//   E(u)       = 1/2 int |grad u|^2 + 2/3 H int u . u_x ^ u_y
//   D_delta(u) = delta int |grad u|^2 + 2 H int u . u_x ^ u_y,   D = D_1
//
// together with the well constants r(delta) and a(delta).

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hflow/error.hpp"
#include "hflow/grid.hpp"

namespace hflow {

inline constexpr double kDeltaMax = 1.5;

namespace detail {

inline void require_open_delta(double delta) {
  if (!(delta > 0.0 && delta < kDeltaMax)) {
    throw DomainError("delta must lie in (0, 3/2), got " + std::to_string(delta));
  }
}

inline void require_half_open_delta(double delta) {
  if (!(delta > 0.0 && delta <= kDeltaMax)) {
    throw DomainError("delta must lie in (0, 3/2], got " + std::to_string(delta));
  }
}

inline void require_positive_H(double H) {
  if (!(H > 0.0) || !std::isfinite(H)) {
    throw DomainError("H must be a positive constant, got " + std::to_string(H));
  }
}

}  // namespace detail

/// Raw trilinear term int u . u_x ^ u_y, without the H factor.
template <class Layout>
double wedge_volume(const BasicVectorField<Layout>& u) {
  const auto g = gradient(u);
  return integrate(dot(u, wedge(g.ux, g.uy)));
}

template <class Layout>
double volume_VH(const BasicVectorField<Layout>& u, double H) {
  return 2.0 / 3.0 * H * wedge_volume(u);
}

template <class Layout>
double energy_E(const BasicVectorField<Layout>& u, double H) {
  return 0.5 * h1_seminorm_sq(u) + volume_VH(u, H);
}

template <class Layout>
double nehari_D(const BasicVectorField<Layout>& u, double H) {
  return h1_seminorm_sq(u) + 2.0 * H * wedge_volume(u);
}

template <class Layout>
double nehari_D_delta(const BasicVectorField<Layout>& u, double H, double delta) {
  detail::require_open_delta(delta);
  return delta * h1_seminorm_sq(u) + 2.0 * H * wedge_volume(u);
}

/// Radius of the ball B_delta: 2 sqrt(2 pi) delta / H.
inline double r_of_delta(double delta, double H) {
  detail::require_half_open_delta(delta);
  detail::require_positive_H(H);
  return 2.0 * std::sqrt(2.0 * std::numbers::pi) * delta / H;
}

inline double a_of_delta(double delta) {
  detail::require_half_open_delta(delta);
  return 0.5 - delta / 3.0;
}

/// int |grad u|^2 - (32 pi)^(1/3) |int u . u_x ^ u_y|^(2/3). Nonnegative for
/// H^1_0 maps up to discretization error.
inline double isoperimetric_gap(double dirichlet, double raw_volume) {
  return dirichlet - std::cbrt(32.0 * std::numbers::pi) * std::pow(std::abs(raw_volume), 2.0 / 3.0);
}

template <class Layout>
double isoperimetric_gap(const BasicVectorField<Layout>& u) {
  return isoperimetric_gap(h1_seminorm_sq(u), wedge_volume(u));
}

struct FunctionalReport {
  double dirichlet = 0.0;  ///< int |grad u|^2
  double volume = 0.0;     ///< V_H(u)
  double energy = 0.0;     ///< E(u)
  double nehari = 0.0;     ///< D(u)
  double l2_sq = 0.0;      ///< |u|_2^2
  std::vector<std::pair<double, double>> nehari_delta;  ///< (delta, D_delta(u))
};

/// Every functional from one gradient evaluation.
template <class Layout>
FunctionalReport report(const BasicVectorField<Layout>& u, double H,
                        std::span<const double> deltas = {}) {
  for (double d : deltas) detail::require_open_delta(d);
  const auto g = gradient(u);
  const double dirichlet = integrate(dot(g.ux, g.ux)) + integrate(dot(g.uy, g.uy));
  const double raw = integrate(dot(u, wedge(g.ux, g.uy)));
  FunctionalReport r;
  r.dirichlet = dirichlet;
  r.volume = 2.0 / 3.0 * H * raw;
  r.energy = 0.5 * dirichlet + r.volume;
  r.nehari = dirichlet + 2.0 * H * raw;
  r.l2_sq = l2_norm_sq(u);
  r.nehari_delta.reserve(deltas.size());
  for (double d : deltas) r.nehari_delta.emplace_back(d, d * dirichlet + 2.0 * H * raw);
  return r;
}

}  // namespace hflow
