#pragma once

// Semi-implicit time integration of
//
//   u_t = Delta u - 2 H u_x ^ u_y   in (0,1)^2,   u = 0 on the boundary,
//
// with the Laplacian taken implicitly (CG solve of I - dt Delta_h) and the
// wedge nonlinearity explicitly. A run records the monitored functionals,
// the concavity quantity of f(t) = int_0^t |u|_2^2 and the energy-identity
// residual.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hflow/error.hpp"
#include "hflow/functionals.hpp"
#include "hflow/grid.hpp"

namespace hflow {

struct FlowParams {
  double H = 1.0;
  double dt0 = 1e-4;
  double t_end = 1.0;
  double dt_min = 1e-10;
  double cg_tol = 1e-12;
  int record_every = 1;
  double blowup_gradient_factor = 1e4;
  double decay_l2_floor = 1e-16;

  void validate() const {
    auto fail = [](const std::string& what) { throw DomainError("flow parameters: " + what); };
    if (!(H >= 0.0) || !std::isfinite(H)) fail("H must be finite and nonnegative");
    if (!(dt_min > 0.0) || !(dt_min < dt0)) fail("need 0 < dt_min < dt0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("t_end must be positive");
    if (!(cg_tol > 0.0 && cg_tol <= 1e-6)) fail("cg_tol must lie in (0, 1e-6]");
    if (record_every < 1) fail("record_every must be >= 1");
    if (!(blowup_gradient_factor > 0.0)) fail("blowup_gradient_factor must be positive");
    if (!(decay_l2_floor > 0.0)) fail("decay_l2_floor must be positive");
  }
};

enum class RunStatus { reached_horizon, blowup_suspected, decayed_to_zero };
enum class StopReason { horizon, dt_collapse, gradient_threshold, l2_floor };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::reached_horizon: return "reached-horizon";
    case RunStatus::blowup_suspected: return "blowup-suspected";
    case RunStatus::decayed_to_zero: return "decayed-to-zero";
  }
  return "?";
}

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::horizon: return "horizon";
    case StopReason::dt_collapse: return "dt-collapse";
    case StopReason::gradient_threshold: return "gradient-threshold";
    case StopReason::l2_floor: return "l2-floor";
  }
  return "?";
}

struct TrajectorySample {
  double t = 0.0;
  double dt = 0.0;  ///< step that produced this sample; 0 for the initial datum
  double l2_sq = 0.0;
  double h1_sq = 0.0;
  double energy = 0.0;
  double nehari = 0.0;
  std::vector<double> nehari_delta;  ///< aligned with TrajectoryRecord::deltas
  double f = 0.0;
  double fprime = 0.0;
  double fsecond = 0.0;
  double concavity = 0.0;
  double energy_residual = 0.0;  ///< cumulative
  double flow_energy = 0.0;      ///< energy in the scheme's own quadratic form
};

struct TrajectoryRecord {
  double H = 0.0;
  std::vector<double> deltas;
  std::vector<TrajectorySample> samples;
  RunStatus status = RunStatus::reached_horizon;
  StopReason reason = StopReason::horizon;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Energy whose decay the scheme respects exactly up to O(dt): the Dirichlet
/// part uses the forward-difference form paired with the 5-point Laplacian.
inline double flow_energy(const VectorField& u, double H) {
  return 0.5 * h1_seminorm_sq_forward(u) + volume_VH(u, H);
}

namespace detail {

// out = v - dt * Delta_h v on one component lattice.
inline void apply_helmholtz(std::span<const double> v, std::span<double> out, int m, double dt,
                            double h) {
  const double c = dt / (h * h);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * m + j;
      double nb = -4.0 * v[p];
      if (i > 0) nb += v[p - m];
      if (i + 1 < m) nb += v[p + m];
      if (j > 0) nb += v[p - 1];
      if (j + 1 < m) nb += v[p + 1];
      out[p] = v[p] - c * nb;
    }
}

inline double dot_span(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
  return s;
}

}  // namespace detail

/// Solves (I - dt Delta_h) w = rhs componentwise by conjugate gradients from a
/// zero initial guess, to relative residual cg_tol. At most 10 n^2 iterations.
inline VectorField solve_helmholtz(const VectorField& rhs, double dt, double cg_tol) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const int m = rhs.extent();
  const double h = rhs.grid().h();
  const std::size_t N = rhs.size();
  const long cap = 10L * rhs.grid().n() * rhs.grid().n();
  VectorField w(rhs.grid());
  std::vector<double> r(N), p(N), Ap(N);
  for (int k = 0; k < 3; ++k) {
    const auto b = rhs.component(k);
    auto x = w.component(k);
    std::copy(b.begin(), b.end(), r.begin());
    std::copy(b.begin(), b.end(), p.begin());
    double rs = detail::dot_span(r, r);
    const double bnorm = std::sqrt(rs);
    if (bnorm == 0.0) continue;
    long it = 0;
    while (std::sqrt(rs) > cg_tol * bnorm) {
      if (++it > cap) {
        throw SolverError("conjugate gradients did not converge", std::sqrt(rs) / bnorm);
      }
      detail::apply_helmholtz(p, Ap, m, dt, h);
      const double alpha = rs / detail::dot_span(p, Ap);
      for (std::size_t q = 0; q < N; ++q) {
        x[q] += alpha * p[q];
        r[q] -= alpha * Ap[q];
      }
      const double rs_new = detail::dot_span(r, r);
      if (!std::isfinite(rs_new)) throw SolverError("conjugate gradients diverged", rs_new);
      const double beta = rs_new / rs;
      rs = rs_new;
      for (std::size_t q = 0; q < N; ++q) p[q] = r[q] + beta * p[q];
    }
  }
  return w;
}

/// One IMEX step: (I - dt Delta_h) w = u - 2 dt H u_x ^ u_y.
inline VectorField step_imex(const VectorField& u, double dt, double H, double cg_tol = 1e-12) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  VectorField rhs = u;
  if (H != 0.0) {
    const auto g = gradient(u);
    rhs -= (2.0 * dt * H) * wedge(g.ux, g.uy);
  }
  return solve_helmholtz(rhs, dt, cg_tol);
}

/// Integrates from u0 until t_end, a blow-up criterion fires, or |u|_2^2
/// falls below the decay floor.
///
/// The step is halved whenever the relative increment exceeds 0.1 or the
/// solve fails; a step below dt_min ends the run as suspected blow-up. The
/// decay floor is not applied to an identically zero datum, which is a
/// fixed point.
inline TrajectoryRecord run(const VectorField& u0, const FlowParams& p, std::span<const double> deltas) {
  p.validate();
  for (double d : deltas) detail::require_open_delta(d);
  if (!u0.all_finite()) throw SamplingError("initial datum has non-finite entries");

  TrajectoryRecord tr;
  tr.H = p.H;
  tr.deltas.assign(deltas.begin(), deltas.end());

  auto make_sample = [&](const VectorField& u, double t, double dt, double f) {
    const FunctionalReport r = report(u, p.H, deltas);
    TrajectorySample s;
    s.t = t;
    s.dt = dt;
    s.l2_sq = r.l2_sq;
    s.h1_sq = r.dirichlet;
    s.energy = r.energy;
    s.nehari = r.nehari;
    for (const auto& [d, v] : r.nehari_delta) s.nehari_delta.push_back(v);
    s.f = f;
    s.fprime = r.l2_sq;
    s.fsecond = -2.0 * r.nehari;
    s.concavity = s.f * s.fsecond - 1.5 * s.fprime * s.fprime;
    s.flow_energy = flow_energy(u, p.H);
    return s;
  };

  VectorField u = u0;
  double t = 0.0;
  double dt = p.dt0;
  double f = 0.0;
  tr.samples.push_back(make_sample(u, 0.0, 0.0, 0.0));
  const double gradient_limit = p.blowup_gradient_factor * std::max(1.0, tr.samples[0].h1_sq);
  const bool watch_decay = tr.samples[0].l2_sq >= p.decay_l2_floor;

  double l2_prev = tr.samples[0].l2_sq;
  double dissipation = 0.0;  // sum dt |u_t|_2^2 since the last record
  double cumulative = 0.0;
  std::size_t since_record = 0;
  const double t_eps = 1e-12 * p.t_end;

  auto collapse = [&] {
    tr.status = RunStatus::blowup_suspected;
    tr.reason = StopReason::dt_collapse;
  };

  bool stopped = false;
  while (!stopped && p.t_end - t > t_eps) {
    const double step = std::min(dt, p.t_end - t);
    VectorField w(u.grid());
    bool ok = true;
    try {
      w = step_imex(u, step, p.H, p.cg_tol);
    } catch (const SolverError&) {
      ok = false;
    }
    if (ok) {
      const double un = lattice_norm(u);
      const double inc = un > 0.0 ? lattice_norm(w - u) / un : (lattice_norm(w) > 0.0 ? 1e300 : 0.0);
      ok = w.all_finite() && inc <= 0.1;
    }
    if (!ok) {
      ++tr.rejected_steps;
      dt *= 0.5;
      if (dt < p.dt_min) {
        collapse();
        if (since_record > 0) {
          // flush the accepted-but-unrecorded tail
          auto s = make_sample(u, t, tr.samples.back().dt, f);
          const double res = std::abs(dissipation + s.flow_energy - tr.samples.back().flow_energy);
          cumulative += res;
          s.energy_residual = cumulative;
          tr.samples.push_back(std::move(s));
        }
        stopped = true;
      }
      continue;
    }

    dissipation += l2_norm_sq(w - u) / step;
    u = std::move(w);
    t = (p.t_end - (t + step) <= t_eps) ? p.t_end : t + step;
    ++tr.accepted_steps;
    ++since_record;

    const double l2_now = l2_norm_sq(u);
    f += 0.5 * step * (l2_prev + l2_now);
    l2_prev = l2_now;

    const double h1_now = h1_seminorm_sq(u);
    const bool grad_fire = h1_now > gradient_limit;
    const bool decay_fire = watch_decay && l2_now < p.decay_l2_floor;
    const bool at_end = p.t_end - t <= t_eps;
    if (grad_fire || decay_fire || at_end || since_record >= static_cast<std::size_t>(p.record_every)) {
      auto s = make_sample(u, t, step, f);
      const double res = std::abs(dissipation + s.flow_energy - tr.samples.back().flow_energy);
      cumulative += res;
      s.energy_residual = cumulative;
      tr.samples.push_back(std::move(s));
      dissipation = 0.0;
      since_record = 0;
    }
    if (grad_fire) {
      tr.status = RunStatus::blowup_suspected;
      tr.reason = StopReason::gradient_threshold;
      stopped = true;
    } else if (decay_fire) {
      tr.status = RunStatus::decayed_to_zero;
      tr.reason = StopReason::l2_floor;
      stopped = true;
    }
  }
  return tr;
}

/// Per recorded interval, |int |u_t|^2 + E(t2) - E(t1)| in the scheme's
/// energy. Empty for fewer than two samples.
inline std::vector<double> energy_identity_residuals(const TrajectoryRecord& tr) {
  std::vector<double> out;
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    out.push_back(tr.samples[k].energy_residual - tr.samples[k - 1].energy_residual);
  }
  return out;
}

}  // namespace hflow
