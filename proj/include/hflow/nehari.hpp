#pragma once

// Fibering-map algebra along rays lambda -> lambda u, Nehari projections, the
// well depth estimate d and the modified depth curve d(delta).
//
// Along a ray the functionals are polynomials in lambda:
//   E(lambda u)       = lambda^2 A / 2 + 2 lambda^3 B / 3
//   D_delta(lambda u) = delta lambda^2 A + 2 lambda^3 B
// with A = int |grad u|^2 and B = H int u . u_x ^ u_y.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hflow/directions.hpp"
#include "hflow/error.hpp"
#include "hflow/functionals.hpp"
#include "hflow/grid.hpp"

namespace hflow {

struct FiberingCoefficients {
  double A = 0.0;
  double B = 0.0;

  double energy(double lambda) const noexcept {
    return lambda * lambda * A / 2.0 + 2.0 * lambda * lambda * lambda * B / 3.0;
  }
  double nehari_delta(double lambda, double delta) const noexcept {
    return delta * lambda * lambda * A + 2.0 * lambda * lambda * lambda * B;
  }
  double nehari(double lambda) const noexcept { return nehari_delta(lambda, 1.0); }
};

template <class Layout>
FiberingCoefficients fibering_coeffs(const BasicVectorField<Layout>& u, double H) {
  const auto g = gradient(u);
  return {integrate(dot(g.ux, g.ux)) + integrate(dot(g.uy, g.uy)),
          H * integrate(dot(u, wedge(g.ux, g.uy)))};
}

/// Unique maximiser -A / (2B) of the fibering map. Requires A > 0, B < 0.
inline double lambda_star(const FiberingCoefficients& c) {
  if (!(c.B < 0.0)) {
    throw NoMaximizerError("fiber energy has no interior maximum: B = " + std::to_string(c.B));
  }
  if (!(c.A > 0.0)) throw NoMaximizerError("fiber direction has zero Dirichlet energy");
  return -c.A / (2.0 * c.B);
}

/// E(lambda* u) = A^3 / (24 B^2), the mountain-pass level of the ray.
inline double fiber_max_energy(const FiberingCoefficients& c) {
  return c.energy(lambda_star(c));
}

/// Scale lambda(delta) = -delta A / (2B) with D_delta(lambda u) = 0.
inline double project_nehari_delta(const FiberingCoefficients& c, double delta) {
  detail::require_open_delta(delta);
  return delta * lambda_star(c);
}

/// (3 - 2 delta) delta^2 d on (0, 3/2].
inline double d_of_delta(double delta, double d) {
  detail::require_half_open_delta(delta);
  if (!(d > 0.0)) throw DomainError("well depth must be positive");
  return (3.0 - 2.0 * delta) * delta * delta * d;
}

/// Roots delta1 in (0, 1], delta2 in [1, 3/2) of d(delta) = e, found by
/// bisection on the monotone branches of (3 - 2 delta) delta^2.
inline std::pair<double, double> delta_roots(double e, double d) {
  if (!(d > 0.0)) throw DomainError("well depth must be positive");
  if (!(e > 0.0) || e > d) {
    throw DomainError("delta roots need 0 < e <= d, got e = " + std::to_string(e) +
                      ", d = " + std::to_string(d));
  }
  if (e == d) return {1.0, 1.0};
  const double target = e / d;
  auto curve = [](double s) { return (3.0 - 2.0 * s) * s * s; };
  constexpr double kTol = 1e-12;
  constexpr double kEdge = 1e-9;

  // increasing branch
  double lo = kEdge, hi = 1.0;
  while (hi - lo > kTol) {
    const double mid = 0.5 * (lo + hi);
    (curve(mid) < target ? lo : hi) = mid;
  }
  const double delta1 = 0.5 * (lo + hi);

  // decreasing branch
  lo = 1.0;
  hi = kDeltaMax - kEdge;
  while (hi - lo > kTol) {
    const double mid = 0.5 * (lo + hi);
    (curve(mid) > target ? lo : hi) = mid;
  }
  return {delta1, 0.5 * (lo + hi)};
}

struct Direction {
  std::string label;
  VectorField field;
};

struct FamilyMember {
  std::string label;
  FiberingCoefficients coeffs;
  std::optional<double> fiber_max;  ///< empty when B >= 0
};

struct WellParameters {
  double H = 1.0;
  double d = 0.0;
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::string provenance;
  std::size_t best_index = 0;
  std::vector<FamilyMember> members;

  /// Fills delta1/delta2 with the roots of d(delta) = e.
  void set_energy_level(double e) {
    const auto [a, b] = delta_roots(e, d);
    delta1 = a;
    delta2 = b;
  }
};

struct BubbleFamilySpec {
  double x0 = 0.5;
  double y0 = 0.5;
  int count = 12;
  double eps_max = 0.5;
  double eps_min = 0.0;  ///< 0 selects the resolution floor 4h
};

inline std::vector<double> bubble_scales(const GridSpec& g, const BubbleFamilySpec& spec) {
  if (spec.count < 1) throw EstimationError("bubble family needs at least one member");
  const double lo = spec.eps_min > 0.0 ? spec.eps_min : 4.0 * g.h();
  const double hi = spec.eps_max;
  if (!(hi >= lo) || !(lo > 0.0)) throw EstimationError("bubble family needs 0 < eps_min <= eps_max");
  std::vector<double> eps;
  eps.reserve(static_cast<std::size_t>(spec.count));
  for (int k = 0; k < spec.count; ++k) {
    const double t = spec.count == 1 ? 1.0 : static_cast<double>(k) / (spec.count - 1);
    eps.push_back(hi * std::pow(lo / hi, t));
  }
  return eps;
}

/// Cutoff bubbles on a logarithmic grid of scales, ordered from wide to
/// concentrated.
inline std::vector<Direction> bubble_family(const GridSpec& g, double H, const BubbleFamilySpec& spec) {
  std::vector<Direction> family;
  for (double eps : bubble_scales(g, spec)) {
    BubbleSpec b{spec.x0, spec.y0, eps};
    family.push_back({"bubble(eps=" + std::to_string(eps) + ")", bubble_field(g, b, H)});
  }
  return family;
}

/// Depth estimate: min over the family of the Nehari-projected fiber energy.
inline WellParameters estimate_d(double H, const GridSpec& g, std::span<const Direction> family,
                                 std::string provenance = "direction family") {
  detail::require_positive_H(H);
  if (family.empty()) throw EstimationError("direction family is empty");
  WellParameters wp;
  wp.H = H;
  wp.d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!(family[i].field.grid() == g)) throw GridMismatchError("family member on a different grid");
    FamilyMember m{family[i].label, fibering_coeffs(family[i].field, H), std::nullopt};
    if (m.coeffs.B < 0.0 && m.coeffs.A > 0.0) {
      m.fiber_max = fiber_max_energy(m.coeffs);
      if (*m.fiber_max < wp.d) {
        wp.d = *m.fiber_max;
        wp.best_index = i;
      }
    }
    wp.members.push_back(std::move(m));
  }
  if (!std::isfinite(wp.d)) throw EstimationError("no family member has B < 0");
  wp.provenance = std::move(provenance);
  return wp;
}

/// Default estimate over the cutoff bubble family.
inline WellParameters estimate_d(double H, const GridSpec& g, const BubbleFamilySpec& spec = {}) {
  detail::require_positive_H(H);
  const auto family = bubble_family(g, H, spec);
  return estimate_d(H, g, family,
                    "min of A^3/(24 B^2) over " + std::to_string(family.size()) +
                        " cutoff bubbles centred at (" + std::to_string(spec.x0) + ", " +
                        std::to_string(spec.y0) + "), log-spaced scales");
}

struct LambdaEstimate {
  double lambda_hat = 0.0;  ///< upper estimate of inf |u|_2 over N_alpha
  double Lambda_hat = 0.0;  ///< lower estimate of sup |u|_2 over N_alpha
  std::size_t kept = 0;
  std::size_t total = 0;
  std::string provenance;
};

/// Projects each sample onto the Nehari manifold, keeps those with
/// ||lambda* u||^2 < 6 alpha and returns the extreme L2 norms. Samples with
/// B >= 0 are skipped.
inline LambdaEstimate sample_lambda_Lambda(double alpha, double d, double H,
                                           std::span<const VectorField> samples) {
  if (!(alpha > d)) throw DomainError("lambda_alpha is defined for alpha > d");
  LambdaEstimate est;
  est.total = samples.size();
  est.lambda_hat = std::numeric_limits<double>::infinity();
  est.Lambda_hat = 0.0;
  for (const auto& u : samples) {
    const auto c = fibering_coeffs(u, H);
    if (!(c.B < 0.0) || !(c.A > 0.0)) continue;
    const double ls = lambda_star(c);
    if (!(ls * ls * c.A < 6.0 * alpha)) continue;
    const double l2 = ls * std::sqrt(l2_norm_sq(u));
    est.lambda_hat = std::min(est.lambda_hat, l2);
    est.Lambda_hat = std::max(est.Lambda_hat, l2);
    ++est.kept;
  }
  if (est.kept == 0) throw EstimationError("no sample lands in N_alpha");
  est.provenance = "sampled heuristic: " + std::to_string(est.kept) + " of " +
                   std::to_string(est.total) + " projected samples inside N_alpha";
  return est;
}

/// Seeded random band-limited fields (sign chosen so B < 0) followed by the
/// bubble family.
inline std::vector<VectorField> lambda_samples(const GridSpec& g, double H, std::uint64_t seed,
                                               int random_count = 200,
                                               const BubbleFamilySpec& bubbles = {}) {
  std::vector<VectorField> out;
  out.reserve(static_cast<std::size_t>(random_count) + static_cast<std::size_t>(bubbles.count));
  for (int k = 0; k < random_count; ++k) {
    auto u = random_bandlimited_field(g, RandomFieldSpec{seed + static_cast<std::uint64_t>(k), 4, 1.0});
    if (wedge_volume(u) > 0.0) u *= -1.0;
    out.push_back(std::move(u));
  }
  for (auto& dir : bubble_family(g, H, bubbles)) out.push_back(std::move(dir.field));
  return out;
}

}  // namespace hflow
