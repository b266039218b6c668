#pragma once

// Potential-well classification of initial data and analysis of finished
// trajectories: sign persistence of D_delta, L2 decay rate, blow-up evidence,
// and the high-energy blow-up condition
//
//   E(u0) <= |u0|_2 < -1/3 H int u0 . u0_x ^ u0_y.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hflow/error.hpp"
#include "hflow/flow.hpp"
#include "hflow/functionals.hpp"
#include "hflow/grid.hpp"
#include "hflow/nehari.hpp"

namespace hflow {

enum class EnergyRegime { low, critical, high };
enum class Well { W_delta, V_delta, boundary, outside };
enum class Theorem { t21, t22, t31, t32, t51_1, t51_2, t52, none };
enum class Outcome { global_decay, blowup, undetermined };

inline const char* to_string(EnergyRegime r) {
  switch (r) {
    case EnergyRegime::low: return "low";
    case EnergyRegime::critical: return "critical";
    case EnergyRegime::high: return "high";
  }
  return "?";
}
inline const char* to_string(Well w) {
  switch (w) {
    case Well::W_delta: return "W_delta";
    case Well::V_delta: return "V_delta";
    case Well::boundary: return "boundary";
    case Well::outside: return "outside";
  }
  return "?";
}
inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::t21: return "t21";
    case Theorem::t22: return "t22";
    case Theorem::t31: return "t31";
    case Theorem::t32: return "t32";
    case Theorem::t51_1: return "t51.1";
    case Theorem::t51_2: return "t51.2";
    case Theorem::t52: return "t52";
    case Theorem::none: return "none";
  }
  return "?";
}
inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::global_decay: return "global-decay";
    case Outcome::blowup: return "blowup";
    case Outcome::undetermined: return "undetermined";
  }
  return "?";
}

struct E54Check {
  bool satisfied = false;
  double energy = 0.0;
  double l2 = 0.0;               ///< |u0|_2 (not squared)
  double volume_bound = 0.0;     ///< -1/3 H int u0 . u0_x ^ u0_y
  double nehari = 0.0;
  double identity_residual = 0.0;  ///< E + 1/3 H int(...) - D/2, zero up to rounding
  bool nehari_negative = false;
};

template <class Layout>
E54Check check_e54(const BasicVectorField<Layout>& u0, double H) {
  const FunctionalReport r = report(u0, H);
  const double B = 1.5 * r.volume;  // H int u . u_x ^ u_y
  E54Check c;
  c.energy = r.energy;
  c.l2 = std::sqrt(r.l2_sq);
  c.volume_bound = -B / 3.0;
  c.nehari = r.nehari;
  c.identity_residual = r.energy + B / 3.0 - 0.5 * r.nehari;
  c.nehari_negative = r.nehari < 0.0;
  c.satisfied = c.energy <= c.l2 && c.l2 < c.volume_bound;
  return c;
}

struct VerdictDetails {
  double energy = 0.0;
  double nehari = 0.0;
  double dirichlet = 0.0;
  double l2 = 0.0;  ///< |u0|_2
  double d = 0.0;
  double tol_d = 0.0;
  double zero_tol = 0.0;  ///< |D| below this counts as D = 0
  std::optional<double> delta1;
  std::optional<double> delta2;
  std::optional<LambdaEstimate> lambda;
  bool heuristic = false;
  E54Check e54;
  std::vector<std::string> notes;
};

struct Verdict {
  EnergyRegime regime = EnergyRegime::low;
  Well well = Well::W_delta;
  Theorem theorem = Theorem::none;
  Outcome expected = Outcome::undetermined;
  VerdictDetails details;
};

/// Relative tolerance for treating D or D_delta as zero: 1e-10 * ||u||^2.
inline constexpr double kSignZeroTol = 1e-10;

/// Default critical-energy band, relative to d.
inline constexpr double kCriticalTolRel = 1e-3;

/// Classifies u0 against the well. lambda_samples feeds the sampled
/// lambda_alpha / Lambda_alpha estimates used in the high-energy regime; with
/// no samples that check is skipped.
inline Verdict classify_initial(const VectorField& u0, const WellParameters& wp, double tol_d,
                                std::span<const VectorField> lambda_samples = {}) {
  const double H = wp.H;
  const FunctionalReport r = report(u0, H);
  Verdict v;
  auto& det = v.details;
  det.energy = r.energy;
  det.nehari = r.nehari;
  det.dirichlet = r.dirichlet;
  det.l2 = std::sqrt(r.l2_sq);
  det.d = wp.d;
  det.tol_d = tol_d;
  det.zero_tol = kSignZeroTol * r.dirichlet;
  det.e54 = check_e54(u0, H);
  const double E = r.energy;
  const double D = r.nehari;

  if (r.l2_sq == 0.0) {
    v.regime = EnergyRegime::low;
    v.well = Well::W_delta;
    v.theorem = Theorem::t21;
    v.expected = Outcome::global_decay;
    det.notes.push_back("zero datum belongs to W");
    return v;
  }

  const bool d_pos = D > det.zero_tol;
  const bool d_neg = D < -det.zero_tol;

  if (std::abs(E - wp.d) <= tol_d) {
    v.regime = EnergyRegime::critical;
    v.well = Well::boundary;
    det.delta1 = 1.0;
    det.delta2 = 1.0;
    if (d_neg) {
      v.theorem = Theorem::t32;
      v.expected = Outcome::blowup;
      det.notes.push_back("critical blow-up uses the hypothesis D(u0) < 0");
    } else {
      v.theorem = Theorem::t31;
      v.expected = Outcome::global_decay;
    }
    return v;
  }

  if (E < wp.d) {
    v.regime = EnergyRegime::low;
    if (E > 0.0) {
      const auto [a, b] = delta_roots(E, wp.d);
      det.delta1 = a;
      det.delta2 = b;
    }
    if (d_pos) {
      v.well = Well::W_delta;
      v.theorem = Theorem::t21;
      v.expected = Outcome::global_decay;
    } else if (d_neg) {
      v.well = Well::V_delta;
      v.theorem = Theorem::t22;
      v.expected = Outcome::blowup;
      if (det.e54.satisfied) det.notes.push_back("high-energy blow-up condition also holds");
    } else {
      v.well = Well::boundary;
      v.theorem = Theorem::none;
      v.expected = Outcome::undetermined;
      det.notes.push_back("D(u0) = 0 with u0 != 0 below the well depth (excluded by ||u||^2 <= 6d)");
    }
    return v;
  }

  v.regime = EnergyRegime::high;
  v.well = Well::outside;
  if (!lambda_samples.empty()) {
    try {
      det.lambda = sample_lambda_Lambda(E, wp.d, H, lambda_samples);
      det.heuristic = true;
      if (d_pos && det.l2 <= det.lambda->lambda_hat) {
        v.theorem = Theorem::t51_1;
        v.expected = Outcome::global_decay;
        return v;
      }
      if (d_neg && det.l2 >= det.lambda->Lambda_hat) {
        v.theorem = Theorem::t51_2;
        v.expected = Outcome::blowup;
        return v;
      }
    } catch (const EstimationError& e) {
      det.notes.push_back(std::string("lambda sampling: ") + e.what());
    }
  }
  if (det.e54.satisfied) {
    v.theorem = Theorem::t52;
    v.expected = Outcome::blowup;
    return v;
  }
  v.theorem = Theorem::none;
  v.expected = Outcome::undetermined;
  return v;
}

/// Roots (delta1, delta2) of d(delta) = E(u0). Requires 0 < E(u0) <= d.
inline std::pair<double, double> delta_window(const VectorField& u0, const WellParameters& wp) {
  const double E = energy_E(u0, wp.H);
  if (!(E > 0.0) || E > wp.d) {
    throw DomainError("delta window needs 0 < E(u0) <= d, got E = " + std::to_string(E));
  }
  return delta_roots(E, wp.d);
}

struct SignPersistenceEntry {
  double delta = 0.0;
  int sign = 0;  ///< sign at the first sample
  bool persistent = true;
  bool inside_window = true;
  std::optional<std::size_t> first_violation;
};

struct SignPersistenceReport {
  bool all_persistent = true;
  std::vector<SignPersistenceEntry> entries;
};

inline int tolerant_sign(double value, double scale) {
  const double tol = kSignZeroTol * scale;
  return value > tol ? 1 : (value < -tol ? -1 : 0);
}

/// Checks that sign D_delta(u(t_k)) is constant over the record for every
/// monitored delta. A window, when given, flags deltas outside (delta1, delta2).
inline SignPersistenceReport check_sign_persistence(
    const TrajectoryRecord& tr, std::optional<std::pair<double, double>> window = std::nullopt) {
  SignPersistenceReport rep;
  for (std::size_t j = 0; j < tr.deltas.size(); ++j) {
    SignPersistenceEntry e;
    e.delta = tr.deltas[j];
    if (window) e.inside_window = e.delta > window->first && e.delta < window->second;
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
      const auto& s = tr.samples[k];
      const int sg = tolerant_sign(s.nehari_delta[j], s.h1_sq);
      if (k == 0) {
        e.sign = sg;
      } else if (sg != e.sign) {
        e.persistent = false;
        e.first_violation = k;
        break;
      }
    }
    rep.all_persistent = rep.all_persistent && e.persistent;
    rep.entries.push_back(e);
  }
  return rep;
}

struct DecayFit {
  double rate = 0.0;  ///< -d/dt log |u|_2^2 by least squares
  bool bound_satisfied = false;
  std::size_t window_samples = 0;
  std::optional<std::size_t> first_bound_violation;
};

/// Least-squares decay rate of |u|_2^2 over the initial window where it stays
/// above 1e3 * decay floor, and the pointwise check
///   |u(t_k)|_2^2 <= |u0|_2^2 exp(-2 (1 - delta1) t_k)
/// at every sample.
inline DecayFit fit_decay_rate(const TrajectoryRecord& tr, double delta1, double decay_l2_floor = 1e-16) {
  const auto& s = tr.samples;
  std::vector<double> ts, ys;
  for (const auto& x : s) {
    if (!(x.l2_sq > 1e3 * decay_l2_floor)) break;
    ts.push_back(x.t);
    ys.push_back(std::log(x.l2_sq));
  }
  if (ts.size() < 2 || ts.back() == ts.front()) {
    throw FitError("decay fit needs at least two samples above the floor");
  }
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    my += ys[k];
  }
  mt /= n;
  my /= n;
  double sty = 0.0, stt = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    sty += (ts[k] - mt) * (ys[k] - my);
    stt += (ts[k] - mt) * (ts[k] - mt);
  }
  DecayFit fit;
  fit.rate = -sty / stt;
  fit.window_samples = ts.size();
  fit.bound_satisfied = true;
  const double l20 = s.front().l2_sq;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].l2_sq > l20 * std::exp(-2.0 * (1.0 - delta1) * s[k].t)) {
      fit.bound_satisfied = false;
      fit.first_bound_violation = k;
      break;
    }
  }
  return fit;
}

struct BlowupReport {
  bool suspected = false;
  double t_last = 0.0;
  std::optional<std::size_t> concavity_positive_from;
  double gradient_max = 0.0;
  bool dt_collapse = false;
  bool gradient_threshold = false;
};

inline BlowupReport blowup_report(const TrajectoryRecord& tr) {
  BlowupReport b;
  b.suspected = tr.status == RunStatus::blowup_suspected;
  b.dt_collapse = b.suspected && tr.reason == StopReason::dt_collapse;
  b.gradient_threshold = b.suspected && tr.reason == StopReason::gradient_threshold;
  if (tr.samples.empty()) return b;
  b.t_last = tr.samples.back().t;
  for (const auto& s : tr.samples) b.gradient_max = std::max(b.gradient_max, s.h1_sq);
  std::size_t k = tr.samples.size();
  while (k > 0 && tr.samples[k - 1].concavity > 0.0) --k;
  if (k < tr.samples.size()) b.concavity_positive_from = k;
  return b;
}

/// Largest ||u(t_k)||^2 relative to 6d; the bound holds when <= 1 + slack.
inline double max_h1_over_six_d(const TrajectoryRecord& tr, double d) {
  double worst = 0.0;
  for (const auto& s : tr.samples) worst = std::max(worst, s.h1_sq / (6.0 * d));
  return worst;
}

/// Expected outcome versus what the run did.
inline bool verdict_consistent(const Verdict& v, const TrajectoryRecord& tr) {
  switch (v.expected) {
    case Outcome::blowup: return tr.status == RunStatus::blowup_suspected;
    case Outcome::global_decay: {
      if (tr.status == RunStatus::decayed_to_zero) return true;
      if (tr.status != RunStatus::reached_horizon) return false;
      for (std::size_t k = 1; k < tr.samples.size(); ++k)
        if (tr.samples[k].l2_sq > tr.samples[k - 1].l2_sq) return false;
      return true;
    }
    case Outcome::undetermined: return true;
  }
  return false;
}

}  // namespace hflow
