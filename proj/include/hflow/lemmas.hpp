#pragma once

// Numerical checks of the structural inequalities over a seeded corpus of
// fields: the isoperimetric bound, the D_delta trichotomy around r(delta),
// the shape of the modified depth curve, the fibering-map properties, the
// identity E + B/3 = D/2 and the H^1 bound below the well.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hflow/classify.hpp"
#include "hflow/directions.hpp"
#include "hflow/functionals.hpp"
#include "hflow/grid.hpp"
#include "hflow/nehari.hpp"

namespace hflow {

struct CorpusSpec {
  std::uint64_t seed = 20240601;
  int random_fields = 50;
  int max_mode = 4;
  std::vector<double> bubble_scales;  ///< extra bubbles for the isoperimetric check
  int directions = 20;                ///< seeded fiber directions
  std::vector<double> deltas{0.25, 0.5, 0.75, 1.0, 1.25, 1.45};
  double iso_slack = 1e-3;            ///< relative to int |grad u|^2
  double curve_slack = 0.02;
  double fiber_rel_tol = 1e-6;
  double identity_rel_tol = 1e-12;
};

struct LemmaResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_slack = std::numeric_limits<double>::infinity();  ///< smallest margin seen
  std::vector<std::string> items;  ///< one line per failure
};

struct LemmaReport {
  std::vector<LemmaResult> results;
  std::vector<std::string> warnings;
  bool all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const LemmaResult& r) { return r.passed; });
  }
};

namespace detail {

inline void record(LemmaResult& r, double margin, const std::string& what) {
  ++r.checked;
  r.worst_slack = std::min(r.worst_slack, margin);
  if (!(margin >= 0.0)) {
    r.passed = false;
    ++r.failures;
    if (r.items.size() < 20) r.items.push_back(what);
  }
}

}  // namespace detail

/// Golden-section search for the maximiser of a unimodal f on [a, b].
inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol = 1e-10) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > rel_tol * std::max(std::abs(a), std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Maximiser of lambda -> E(lambda u) by direct evaluation of E on scaled
/// fields. The bracket is grown by doubling until the energy drops.
inline double fiber_argmax(const VectorField& u, double H) {
  auto f = [&](double lambda) { return energy_E(lambda * u, H); };
  double hi = 1.0;
  for (int k = 0; k < 200 && f(2.0 * hi) >= f(hi); ++k) hi *= 2.0;
  return golden_section_max(f, 0.0, 2.0 * hi);
}

/// Seeded random band-limited fields, sign-flipped so that B < 0.
inline std::vector<VectorField> random_corpus(const GridSpec& g, std::uint64_t seed, int count, int max_mode) {
  std::vector<VectorField> out;
  for (int k = 0; k < count; ++k) {
    auto u = random_bandlimited_field(g, RandomFieldSpec{seed + static_cast<std::uint64_t>(k), max_mode, 1.0});
    if (wedge_volume(u) > 0.0) u *= -1.0;
    out.push_back(std::move(u));
  }
  return out;
}

inline LemmaResult check_isoperimetric(std::span<const VectorField> corpus, double slack) {
  LemmaResult r;
  r.name = "isoperimetric";
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const double A = h1_seminorm_sq(corpus[k]);
    const double gap = isoperimetric_gap(A, wedge_volume(corpus[k]));
    const double margin = A > 0.0 ? gap / A + slack : gap;
    detail::record(r, margin, "field " + std::to_string(k) + ": gap/A = " + std::to_string(gap / A));
  }
  return r;
}

/// 0 < ||u|| < r(delta) implies D_delta(u) > 0, and D_delta(u) < 0 implies
/// ||u|| > r(delta), on each field scaled through its fiber. Also checks
/// ||lambda* u|| >= r(1) (1 - slack).
inline LemmaResult check_trichotomy(std::span<const VectorField> corpus, double H,
                                    std::span<const double> deltas, double slack) {
  LemmaResult r;
  r.name = "nehari-trichotomy";
  static constexpr double kMultiples[] = {0.1, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0};
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto c = fibering_coeffs(corpus[k], H);
    if (!(c.B < 0.0) || !(c.A > 0.0)) continue;
    const double ls = lambda_star(c);
    const double projected = ls * std::sqrt(c.A);
    const double r1 = r_of_delta(1.0, H);
    detail::record(r, projected / r1 - (1.0 - slack),
                   "field " + std::to_string(k) + ": ||lambda* u|| / r(1) = " + std::to_string(projected / r1));
    for (double m : kMultiples) {
      const double lambda = m * ls;
      const double norm = lambda * std::sqrt(c.A);
      for (double delta : deltas) {
        if (!(delta < kDeltaMax)) continue;
        const double rd = r_of_delta(delta, H);
        const double D = c.nehari_delta(lambda, delta);
        const double scale = lambda * lambda * c.A;
        if (norm < rd) {
          detail::record(r, D / scale,
                         "field " + std::to_string(k) + ", delta " + std::to_string(delta) +
                             ": ||u|| < r(delta) but D_delta = " + std::to_string(D));
        }
        if (D < 0.0) {
          detail::record(r, norm / rd - 1.0,
                         "field " + std::to_string(k) + ", delta " + std::to_string(delta) +
                             ": D_delta < 0 but ||u|| / r(delta) = " + std::to_string(norm / rd));
        }
      }
    }
  }
  return r;
}

/// The depth curve measured by projecting the best direction onto each
/// N_delta against (3 - 2 delta) delta^2 d(1), its maximum at delta = 1 and
/// the lower bound a(delta) r(delta)^2.
inline LemmaResult check_depth_curve(const FiberingCoefficients& best, double H,
                                     std::span<const double> deltas, double slack) {
  LemmaResult r;
  r.name = "depth-curve";
  const double d1 = fiber_max_energy(best);
  double peak = -std::numeric_limits<double>::infinity();
  double peak_delta = 0.0;
  for (double delta : deltas) {
    const double lambda = delta < kDeltaMax ? project_nehari_delta(best, delta) : delta * lambda_star(best);
    const double measured = best.energy(lambda);
    const double model = d_of_delta(delta, d1);
    const double bound = a_of_delta(delta) * std::pow(r_of_delta(delta, H), 2);
    const double rel_err = model > 0.0 ? std::abs(measured - model) / model : std::abs(measured) / d1;
    detail::record(r, slack - rel_err,
                   "delta " + std::to_string(delta) + ": d(delta) = " + std::to_string(measured) +
                       " vs model " + std::to_string(model));
    detail::record(r, (measured - (1.0 - slack) * bound) / d1,
                   "delta " + std::to_string(delta) + ": d(delta) = " + std::to_string(measured) +
                       " below a r^2 = " + std::to_string(bound));
    if (measured > peak) {
      peak = measured;
      peak_delta = delta;
    }
  }
  if (std::find(deltas.begin(), deltas.end(), 1.0) != deltas.end()) {
    detail::record(r, peak_delta == 1.0 ? 0.0 : -1.0,
                   "curve maximum at delta = " + std::to_string(peak_delta));
  }
  return r;
}

/// Fiber properties along each direction: golden-section maximiser equals
/// lambda*, D changes sign at lambda*, and E(lambda* u) dominates the fiber.
inline LemmaResult check_fibers(std::span<const VectorField> directions, double H, double rel_tol) {
  LemmaResult r;
  r.name = "fibering-map";
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const auto& u = directions[k];
    const auto c = fibering_coeffs(u, H);
    if (!(c.B < 0.0) || !(c.A > 0.0)) continue;
    const double ls = lambda_star(c);
    const std::string tag = "direction " + std::to_string(k);
    const double gs = fiber_argmax(u, H);
    detail::record(r, rel_tol - std::abs(gs - ls) / ls,
                   tag + ": golden-section argmax " + std::to_string(gs) + " vs lambda* " + std::to_string(ls));
    const double scale = c.A * ls * ls;
    detail::record(r, nehari_D(0.5 * ls * u, H) / scale, tag + ": D(lambda*/2 u) <= 0");
    detail::record(r, 1e-8 - std::abs(nehari_D(ls * u, H)) / scale, tag + ": D(lambda* u) != 0");
    detail::record(r, -nehari_D(2.0 * ls * u, H) / scale, tag + ": D(2 lambda* u) >= 0");
    const double top = energy_E(ls * u, H);
    for (double m : {0.25, 0.5, 2.0, 4.0}) {
      detail::record(r, (top - energy_E(m * ls * u, H)) / std::abs(top) + 1e-12,
                     tag + ": E exceeds the fiber maximum at " + std::to_string(m) + " lambda*");
    }
    detail::record(r, -energy_E(4.0 * ls * u, H) / std::abs(top), tag + ": E(4 lambda* u) >= 0");
  }
  return r;
}

/// E + B/3 - D/2 = 0 with B = H int u . u_x ^ u_y, to relative rounding.
inline LemmaResult check_identity(std::span<const VectorField> corpus, double H, double rel_tol) {
  LemmaResult r;
  r.name = "energy-nehari-identity";
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    for (double m : {0.5, 1.0, 3.0}) {
      const auto e = check_e54(m * corpus[k], H);
      const double scale = std::max({std::abs(e.energy), std::abs(e.nehari), 3.0 * std::abs(e.volume_bound),
                                     std::numeric_limits<double>::min()});
      detail::record(r, rel_tol - std::abs(e.identity_residual) / scale,
                     "field " + std::to_string(k) + ": residual " + std::to_string(e.identity_residual));
    }
  }
  return r;
}

/// Fields with E < alpha and D > 0 satisfy ||u||^2 < 6 alpha, for alpha = d
/// and alpha = 2d, over each corpus fiber.
inline LemmaResult check_h1_bound(std::span<const VectorField> corpus, double H, double d) {
  LemmaResult r;
  r.name = "h1-bound-below-well";
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto c = fibering_coeffs(corpus[k], H);
    if (!(c.A > 0.0)) continue;
    const double ls = c.B < 0.0 ? lambda_star(c) : std::sqrt(6.0 * d / c.A);
    for (double m : {0.1, 0.5, 0.9, 0.99}) {
      const double lambda = m * ls;
      const double A = lambda * lambda * c.A;
      const double E = c.energy(lambda);
      const double D = c.nehari(lambda);
      for (double alpha : {d, 2.0 * d}) {
        if (E < alpha && D > 0.0) {
          detail::record(r, 1.0 - A / (6.0 * alpha),
                         "field " + std::to_string(k) + ": ||u||^2 / 6 alpha = " + std::to_string(A / (6.0 * alpha)));
        }
      }
    }
  }
  return r;
}

/// Runs every checker. The depth curve uses the best member of the bubble
/// family in wp.
inline LemmaReport verify_lemmas(const GridSpec& g, const WellParameters& wp, const CorpusSpec& spec,
                                 const BubbleFamilySpec& family) {
  LemmaReport rep;
  const double H = wp.H;
  auto corpus = random_corpus(g, spec.seed, spec.random_fields, spec.max_mode);
  for (double eps : spec.bubble_scales) corpus.push_back(bubble_field(g, BubbleSpec{family.x0, family.y0, eps}, H));
  const auto directions =
      random_corpus(g, spec.seed + static_cast<std::uint64_t>(spec.random_fields) + 7919, spec.directions, spec.max_mode);

  if (corpus.empty()) rep.warnings.push_back("corpus is empty; field checks pass trivially");
  if (directions.empty()) rep.warnings.push_back("no fiber directions; fibering checks pass trivially");

  rep.results.push_back(check_isoperimetric(corpus, spec.iso_slack));
  rep.results.push_back(check_trichotomy(corpus, H, spec.deltas, spec.curve_slack));
  rep.results.push_back(check_depth_curve(wp.members.at(wp.best_index).coeffs, H, spec.deltas, spec.curve_slack));
  rep.results.push_back(check_fibers(directions, H, spec.fiber_rel_tol));
  rep.results.push_back(check_identity(corpus, H, spec.identity_rel_tol));
  rep.results.push_back(check_h1_bound(corpus, H, wp.d));
  return rep;
}

}  // namespace hflow
