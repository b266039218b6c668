#pragma once

// Experiment commands behind the hflow executable. Each command takes a
// parsed configuration and an output directory, writes its artifacts there
// and returns the in-memory result; hard errors propagate as exceptions and
// are mapped to exit codes by exit_code_for().
//
// Exit codes: 0 success, 1 configuration or usage error (including an
// unbuildable initial datum), 2 numerical hard failure, 3 lemma failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hflow/classify.hpp"
#include "hflow/config.hpp"
#include "hflow/directions.hpp"
#include "hflow/error.hpp"
#include "hflow/flow.hpp"
#include "hflow/grid.hpp"
#include "hflow/io.hpp"
#include "hflow/lemmas.hpp"
#include "hflow/nehari.hpp"

namespace hflow {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitLemma = 3 };

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SamplingError*>(&e) ||
      dynamic_cast<const InvalidGridError*>(&e) || dynamic_cast<const SchemaError*>(&e)) {
    return kExitConfig;
  }
  return kExitNumerical;
}

inline BubbleFamilySpec family_spec(const ExperimentConfig& c) {
  return {c.well.center[0], c.well.center[1], c.well.family_size, c.well.eps_max, c.well.eps_min};
}

inline WellParameters well_for(const ExperimentConfig& c, const GridSpec& g) {
  if (c.well.family_size < 1) throw EstimationError("well family is empty (family_size = 0)");
  return estimate_d(c.H, g, family_spec(c));
}

struct E54Construction {
  VectorField field;
  double s = 0.0;  ///< u0 = s lambda* w
};

/// Smallest s on the grid 1.5 * 1.05^k with s lambda* w satisfying the
/// high-energy blow-up condition. Beyond s = 3/2 the energy is already
/// nonpositive, so only |u0|_2 < -B/3 is left, and it holds once the cubic
/// term dominates.
inline E54Construction construct_e54(const VectorField& w, double H) {
  const double ls = lambda_star(fibering_coeffs(w, H));
  for (double s = 1.5; s < 1e4; s *= 1.05) {
    VectorField u = (s * ls) * w;
    if (check_e54(u, H).satisfied) return {std::move(u), s};
  }
  throw EstimationError("no scaling of the direction satisfies the high-energy condition");
}

namespace detail {

inline VectorField direction_field(const ExperimentConfig& c, const GridSpec& g, const WellParameters* wp) {
  if (c.ic.direction == "best-bubble") {
    if (!wp) throw ConfigError("best-bubble direction needs H > 0");
    auto family = bubble_family(g, c.H, family_spec(c));
    return std::move(family.at(wp->best_index).field);
  }
  return bubble_field(g, BubbleSpec{c.ic.center[0], c.ic.center[1], c.ic.scale}, c.H);
}

}  // namespace detail

inline VectorField build_initial_condition(const ExperimentConfig& c, const GridSpec& g,
                                           const WellParameters* wp) {
  const auto& ic = c.ic;
  if (ic.type == "zero") return VectorField(g);
  if (ic.type == "eigenmode") {
    return eigenmode_field(g, EigenmodeSpec{ic.modes[0], ic.modes[1], ic.component, ic.amplitude});
  }
  if (ic.type == "random-bandlimited") {
    return random_bandlimited_field(g, RandomFieldSpec{*ic.seed, ic.max_mode, ic.amplitude});
  }
  if (!(c.H > 0.0)) throw ConfigError("initial datum type \"" + ic.type + "\" needs H > 0");
  if (ic.type == "bubble") {
    return ic.amplitude * bubble_field(g, BubbleSpec{ic.center[0], ic.center[1], ic.scale}, c.H);
  }
  const VectorField w = detail::direction_field(c, g, wp);
  if (ic.type == "scaled-direction") {
    const double ls = lambda_star(fibering_coeffs(w, c.H));
    return (ic.lambda_multiple * ls) * w;
  }
  return construct_e54(w, c.H).field;  // "e54"
}

/// Monitored deltas when the config says "auto": three points inside
/// (delta1, delta2) below the well, three points of (0, min(3/2, -2B/A))
/// where every D_delta is negative for E <= 0 and D < 0, and {1} otherwise.
inline std::vector<double> auto_deltas(const FunctionalReport& r, const WellParameters* wp) {
  static constexpr double kFractions[] = {0.25, 0.5, 0.75};
  std::vector<double> out;
  if (!wp || r.l2_sq == 0.0) return {1.0};
  const double tol = kCriticalTolRel * wp->d;
  if (r.energy > 0.0 && r.energy < wp->d - tol) {
    const auto [a, b] = delta_roots(r.energy, wp->d);
    for (double f : kFractions) out.push_back(a + (b - a) * f);
    return out;
  }
  const double B = 1.5 * r.volume;
  if (r.energy <= 0.0 && r.nehari < 0.0 && r.dirichlet > 0.0) {
    const double top = std::min(kDeltaMax, -2.0 * B / r.dirichlet);
    for (double f : kFractions) out.push_back(f * top);
    return out;
  }
  return {1.0};
}

inline Verdict heat_flow_verdict(const VectorField& u0) {
  const FunctionalReport r = report(u0, 0.0);
  Verdict v;
  v.regime = EnergyRegime::low;
  v.well = Well::W_delta;
  v.theorem = Theorem::none;
  v.expected = Outcome::global_decay;
  v.details.energy = r.energy;
  v.details.nehari = r.nehari;
  v.details.dirichlet = r.dirichlet;
  v.details.l2 = std::sqrt(r.l2_sq);
  v.details.e54 = check_e54(u0, 0.0);
  v.details.notes.push_back("H = 0: linear heat flow, no well depth");
  return v;
}

struct Prepared {
  GridSpec grid;
  std::optional<WellParameters> well;
  VectorField u0;
  std::vector<double> deltas;
  Verdict verdict;
  FlowParams params;
};

inline Prepared prepare(const ExperimentConfig& c) {
  const GridSpec g = make_grid(c.n);
  std::optional<WellParameters> wp;
  if (c.H > 0.0) wp = well_for(c, g);
  VectorField u0 = build_initial_condition(c, g, wp ? &*wp : nullptr);
  const FunctionalReport r0 = report(u0, c.H);

  Verdict verdict;
  if (wp) {
    const double tol_d = c.well.tol_d_rel * wp->d;
    std::vector<VectorField> samples;
    if (r0.energy > wp->d + tol_d && c.well.lambda_samples > 0) {
      samples = lambda_samples(g, c.H, c.well.lambda_seed, c.well.lambda_samples, family_spec(c));
    }
    verdict = classify_initial(u0, *wp, tol_d, samples);
  } else {
    verdict = heat_flow_verdict(u0);
  }

  FlowParams p;
  p.H = c.H;
  p.dt0 = c.time.dt0;
  p.t_end = c.time.t_end;
  p.dt_min = c.time.dt_min;
  p.cg_tol = c.time.cg_tol;
  p.record_every = c.monitors.record_every;
  p.blowup_gradient_factor = c.monitors.blowup_gradient_factor;
  p.decay_l2_floor = c.monitors.decay_l2_floor;

  std::vector<double> deltas =
      c.monitors.delta_list ? *c.monitors.delta_list : auto_deltas(r0, wp ? &*wp : nullptr);
  return {g, std::move(wp), std::move(u0), std::move(deltas), std::move(verdict), p};
}

struct SimulateResult {
  Verdict verdict;
  TrajectoryRecord record;
  bool consistent = true;
};

/// Builds u0, classifies it, runs the flow and writes trajectory.csv (or
/// trajectory.json) and verdict.json into out_dir.
inline SimulateResult cmd_simulate(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  Prepared p = prepare(c);
  SimulateResult res;
  res.record = run(p.u0, p.params, p.deltas);
  res.verdict = std::move(p.verdict);
  res.consistent = verdict_consistent(res.verdict, res.record);

  if (c.output.format == "json") {
    write_json(out_dir / "trajectory.json", trajectory_json(res.record));
  } else {
    write_text(out_dir / "trajectory.csv", trajectory_csv(res.record));
  }
  Json doc = {{"verdict", to_json(res.verdict)},
              {"run", run_summary_json(res.record)},
              {"consistent", res.consistent},
              {"config", to_json(c)}};
  write_json(out_dir / "verdict.json", doc);
  return res;
}

inline Verdict cmd_classify(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  Prepared p = prepare(c);
  Json doc = {{"verdict", to_json(p.verdict)}, {"deltas", p.deltas}, {"config", to_json(c)}};
  write_json(out_dir / "verdict.json", doc);
  return p.verdict;
}

inline WellParameters cmd_compute_well_depth(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  if (!(c.H > 0.0)) throw ConfigError("compute-well-depth needs H > 0");
  const GridSpec g = make_grid(c.n);
  WellParameters wp = well_for(c, g);
  write_json(out_dir / "well.json", to_json(wp, c.well.delta_grid));
  return wp;
}

inline LemmaReport cmd_verify_lemmas(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  if (!(c.H > 0.0)) throw ConfigError("verify-lemmas needs H > 0");
  const GridSpec g = make_grid(c.n);
  const WellParameters wp = well_for(c, g);
  LemmaReport rep = verify_lemmas(g, wp, c.corpus, family_spec(c));
  Json doc = to_json(rep);
  doc["d"] = wp.d;
  doc["n"] = c.n;
  write_json(out_dir / "lemmas.json", doc);
  return rep;
}

struct SweepCell {
  std::size_t index = 0;
  Json value;
  std::string dir;
  std::optional<std::string> error;
  int error_code = 0;
  std::optional<SimulateResult> result;
};

/// Runs one simulation per value of the swept parameter, concurrently, each
/// into out_dir/cell_<k>. Failures are recorded per cell. index.json is
/// written once after every cell has finished.
inline std::vector<SweepCell> cmd_sweep(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
  if (!c.sweep) throw ConfigError("sweep command needs a /sweep section");
  const auto& sw = *c.sweep;
  nlohmann::json::json_pointer ptr;
  try {
    ptr = nlohmann::json::json_pointer(sw.parameter);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad /sweep/parameter: " + std::string(e.what()));
  }
  Json base = to_json(c);
  base.erase("sweep");

  std::vector<SweepCell> cells(sw.values.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cells[k].index = k;
    cells[k].value = sw.values[k];
    cells[k].dir = "cell_" + std::to_string(k);
  }
  std::filesystem::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      auto& cell = cells[k];
      try {
        Json j = base;
        j[ptr] = cell.value;
        const ExperimentConfig cc = parse_config(j);
        cell.result = cmd_simulate(cc, out_dir / cell.dir);
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.error_code = exit_code_for(e);
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads =
      std::min<std::size_t>(cells.size(), sw.threads > 0 ? static_cast<std::size_t>(sw.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Json index = Json::array();
  for (const auto& cell : cells) {
    Json e = {{"index", cell.index}, {"value", cell.value}, {"dir", cell.dir}};
    if (cell.error) {
      e["error"] = *cell.error;
      e["exit_code"] = cell.error_code;
    } else {
      const auto& r = *cell.result;
      e["status"] = to_string(r.record.status);
      e["expected_outcome"] = to_string(r.verdict.expected);
      e["applicable_theorem"] = to_string(r.verdict.theorem);
      e["well"] = to_string(r.verdict.well);
      e["energy_regime"] = to_string(r.verdict.regime);
      e["consistent"] = r.consistent;
    }
    index.push_back(e);
  }
  write_json(out_dir / "index.json", {{"parameter", sw.parameter}, {"cells", index}});
  return cells;
}

}  // namespace hflow
