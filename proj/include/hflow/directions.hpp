#pragma once

// Analytic field families: Dirichlet eigenmodes, cutoff stereographic
// bubbles, and seeded random band-limited fields.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hflow/error.hpp"
#include "hflow/grid.hpp"

namespace hflow {

/// [16 x(1-x) y(1-y)]^2: C^2, equal to 1 at the centre, vanishing with its
/// gradient on the boundary.
inline double bubble_cutoff(double x, double y) {
  const double p = 16.0 * x * (1.0 - x) * y * (1.0 - y);
  return p * p;
}

/// Inverse stereographic projection (2 z1, 2 z2, |z|^2 - 1) / (1 + |z|^2).
inline Vec3 inverse_stereographic(double z1, double z2) {
  const double r2 = z1 * z1 + z2 * z2;
  const double s = 1.0 / (1.0 + r2);
  return {2.0 * z1 * s, 2.0 * z2 * s, (r2 - 1.0) * s};
}

struct BubbleSpec {
  double x0 = 0.5;
  double y0 = 0.5;
  double scale = 0.1;  ///< concentration scale epsilon
};

/// phi(x) (Pi^-1((x - x0)/eps) - e3) / H. The pole e3 is subtracted so the
/// profile decays like eps/|x - x0| away from the centre; the orientation
/// makes int u . u_x ^ u_y negative.
inline Vec3 bubble_value(const BubbleSpec& b, double H, double x, double y) {
  Vec3 p = inverse_stereographic((x - b.x0) / b.scale, (y - b.y0) / b.scale);
  p[2] -= 1.0;
  const double c = bubble_cutoff(x, y) / H;
  return {c * p[0], c * p[1], c * p[2]};
}

template <class Layout = ZeroTrace>
BasicVectorField<Layout> bubble_field(const GridSpec& g, const BubbleSpec& b, double H) {
  if (!(b.scale > 0.0)) throw SamplingError("bubble scale must be positive");
  if (!(H > 0.0)) throw SamplingError("bubble needs H > 0");
  return sample<Layout>([&](double x, double y) { return bubble_value(b, H, x, y); }, g);
}

struct EigenmodeSpec {
  int p = 1;
  int q = 1;
  int component = 0;
  double amplitude = 1.0;
};

template <class Layout = ZeroTrace>
BasicVectorField<Layout> eigenmode_field(const GridSpec& g, const EigenmodeSpec& e) {
  if (e.p < 1 || e.q < 1 || e.component < 0 || e.component > 2) {
    throw SamplingError("eigenmode needs p, q >= 1 and component in {0, 1, 2}");
  }
  return sample<Layout>(
      [&](double x, double y) {
        Vec3 v{0.0, 0.0, 0.0};
        v[e.component] = e.amplitude * std::sin(e.p * std::numbers::pi * x) *
                         std::sin(e.q * std::numbers::pi * y);
        return v;
      },
      g);
}

/// Discrete Dirichlet eigenvalue of -Delta_h for sin(p pi x) sin(q pi y).
inline double discrete_eigenvalue(const GridSpec& g, int p, int q) {
  const double h = g.h();
  const double sp = std::sin(p * std::numbers::pi * h / 2.0);
  const double sq = std::sin(q * std::numbers::pi * h / 2.0);
  return 4.0 / (h * h) * (sp * sp + sq * sq);
}

struct RandomFieldSpec {
  std::uint64_t seed = 0;
  int max_mode = 4;
  double amplitude = 1.0;
};

/// sum_{p,q <= K} c_kpq sin(p pi x) sin(q pi y) / (p^2 + q^2) per component,
/// with c ~ N(0, 1) drawn from a seeded mt19937_64.
template <class Layout = ZeroTrace>
BasicVectorField<Layout> random_bandlimited_field(const GridSpec& g, const RandomFieldSpec& spec) {
  if (spec.max_mode < 1) throw SamplingError("random field needs max_mode >= 1");
  const int K = spec.max_mode;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> coeff(static_cast<std::size_t>(3 * K * K));
  for (auto& c : coeff) c = normal(rng);

  const int m = BasicVectorField<Layout>(g).extent();
  // Separable tables: sin(p pi x_i) for every mode and node.
  std::vector<double> table(static_cast<std::size_t>(K * m));
  for (int p = 0; p < K; ++p)
    for (int i = 0; i < m; ++i)
      table[p * m + i] = std::sin((p + 1) * std::numbers::pi * Layout::coord(g, i));

  BasicVectorField<Layout> u(g);
  for (int k = 0; k < 3; ++k)
    for (int p = 0; p < K; ++p)
      for (int q = 0; q < K; ++q) {
        const double c = spec.amplitude * coeff[(k * K + p) * K + q] /
                         static_cast<double>((p + 1) * (p + 1) + (q + 1) * (q + 1));
        for (int i = 0; i < m; ++i) {
          const double sx = c * table[p * m + i];
          for (int j = 0; j < m; ++j) u(k, i, j) += sx * table[q * m + j];
        }
      }
  return u;
}

}  // namespace hflow
