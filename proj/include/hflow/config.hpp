#pragma once

// Experiment configuration: a single JSON document, parsed strictly (unknown
// keys are rejected so typos do not silently fall back to defaults).
//
//   grid.n                 interior nodes per axis, 3..1023
//   physics.H              constant mean curvature, >= 0 (0 gives the heat flow)
//   ic.type                zero | eigenmode | bubble | scaled-direction |
//                          random-bandlimited | e54
//   time                   dt0, t_end, dt_min, cg_tol
//   monitors               delta_list ("auto" or numbers in (0, 3/2)),
//                          record_every, blowup_gradient_factor, decay_l2_floor
//   well                   bubble family and tolerances for the depth estimate
//   corpus                 seeded fields for verify-lemmas
//   sweep                  parameter (JSON pointer into this document), values
//   output                 path, format (csv | json)

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hflow/error.hpp"
#include "hflow/lemmas.hpp"

namespace hflow {

using Json = nlohmann::json;

struct IcConfig {
  std::string type = "scaled-direction";
  std::array<double, 2> center{0.5, 0.5};
  double scale = 0.1;
  double amplitude = 1.0;
  double lambda_multiple = 1.0;
  std::string direction = "bubble";  ///< bubble | best-bubble
  std::optional<std::uint64_t> seed;
  std::array<int, 2> modes{1, 1};
  int component = 0;
  int max_mode = 4;
};

struct TimeConfig {
  double dt0 = 1e-4;
  double t_end = 1.0;
  double dt_min = 1e-10;
  double cg_tol = 1e-12;
};

struct MonitorConfig {
  std::optional<std::vector<double>> delta_list;  ///< empty optional means "auto"
  int record_every = 1;
  double blowup_gradient_factor = 1e4;
  double decay_l2_floor = 1e-16;
};

struct WellConfig {
  int family_size = 12;
  double eps_min = 0.0;  ///< 0 selects 4h
  double eps_max = 0.5;
  std::array<double, 2> center{0.5, 0.5};
  std::vector<double> delta_grid{0.25, 0.5, 0.75, 1.0, 1.25, 1.45};
  double tol_d_rel = 1e-3;
  int lambda_samples = 200;
  std::uint64_t lambda_seed = 1;
};

struct SweepConfig {
  std::string parameter;  ///< JSON pointer, e.g. "/ic/lambda_multiple"
  std::vector<Json> values;
  int threads = 0;  ///< 0 uses the hardware concurrency
};

struct OutputConfig {
  std::string path = "out";
  std::string format = "csv";
};

struct ExperimentConfig {
  int n = 63;
  double H = 1.0;
  IcConfig ic;
  TimeConfig time;
  MonitorConfig monitors;
  WellConfig well;
  CorpusSpec corpus;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
};

namespace detail {

class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key " + path_ + "/" + k);
    }
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const std::string& key) const { return path_ + "/" + key; }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const Json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(where(key) + " has the wrong type");
      }
    }
  }

  void number(const std::string& key, double& out, double lo, double hi, bool open_lo = false) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
      const double x = v->get<double>();
      const bool ok = std::isfinite(x) && (open_lo ? x > lo : x >= lo) && x <= hi;
      if (!ok) throw ConfigError(where(key) + " out of range: " + v->dump());
      out = x;
    }
  }

  void integer(const std::string& key, int& out, int lo, int hi) {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
      const auto x = v->get<long long>();
      if (x < lo || x > hi) throw ConfigError(where(key) + " out of range: " + v->dump());
      out = static_cast<int>(x);
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        throw ConfigError(where(key) + " must be a nonnegative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void choice(const std::string& key, std::string& out, std::initializer_list<const char*> allowed) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
      const auto s = v->get<std::string>();
      for (const char* a : allowed)
        if (s == a) {
          out = s;
          return;
        }
      throw ConfigError(where(key) + " has unsupported value \"" + s + "\"");
    }
  }

  void point(const std::string& key, std::array<double, 2>& out) {
    if (const Json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ConfigError(where(key) + " must be a pair of numbers");
      }
      for (int k = 0; k < 2; ++k) {
        const double x = (*v)[k].get<double>();
        if (!(x > 0.0 && x < 1.0)) throw ConfigError(where(key) + " must lie inside the unit square");
        out[k] = x;
      }
    }
  }

  void deltas(const std::string& key, std::vector<double>& out, bool allow_endpoint) {
    if (const Json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + " must be an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
        const double d = e.get<double>();
        if (!(d > 0.0 && (allow_endpoint ? d <= 1.5 : d < 1.5))) {
          throw ConfigError(where(key) + " entries must lie in (0, 3/2): " + e.dump());
        }
        out.push_back(d);
      }
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline const Json& empty_object() {
  static const Json j = Json::object();
  return j;
}

inline const Json& sub(Section& s, const std::string& key) {
  const Json* v = s.find(key);
  return v ? *v : empty_object();
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig c;
  detail::Section root(j, "");
  {
    detail::Section s(detail::sub(root, "grid"), "/grid");
    s.integer("n", c.n, 3, 1023);
  }
  {
    detail::Section s(detail::sub(root, "physics"), "/physics");
    s.number("H", c.H, 0.0, 1e6);
  }
  {
    auto& ic = c.ic;
    detail::Section s(detail::sub(root, "ic"), "/ic");
    s.choice("type", ic.type, {"zero", "eigenmode", "bubble", "scaled-direction", "random-bandlimited", "e54"});
    s.point("center", ic.center);
    s.number("scale", ic.scale, 0.0, 10.0, true);
    s.number("amplitude", ic.amplitude, -1e6, 1e6);
    s.number("lambda_multiple", ic.lambda_multiple, 0.0, 1e3);
    s.choice("direction", ic.direction, {"bubble", "best-bubble"});
    if (const Json* v = s.find("seed")) {
      if (!v->is_number_integer() || v->get<long long>() < 0) throw ConfigError("/ic/seed must be a nonnegative integer");
      ic.seed = v->get<std::uint64_t>();
    }
    if (const Json* v = s.find("modes")) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer()) {
        throw ConfigError("/ic/modes must be a pair of integers");
      }
      ic.modes = {(*v)[0].get<int>(), (*v)[1].get<int>()};
      if (ic.modes[0] < 1 || ic.modes[1] < 1) throw ConfigError("/ic/modes entries must be >= 1");
    }
    s.integer("component", ic.component, 0, 2);
    s.integer("max_mode", ic.max_mode, 1, 64);
    if (ic.type == "random-bandlimited" && !ic.seed) {
      throw ConfigError("/ic/seed is required for random-bandlimited initial data");
    }
  }
  {
    auto& t = c.time;
    detail::Section s(detail::sub(root, "time"), "/time");
    s.number("dt0", t.dt0, 0.0, 1.0, true);
    s.number("t_end", t.t_end, 0.0, 1e4, true);
    s.number("dt_min", t.dt_min, 0.0, 1.0, true);
    s.number("cg_tol", t.cg_tol, 0.0, 1e-6, true);
    if (!(t.dt_min < t.dt0)) throw ConfigError("/time/dt_min must be smaller than /time/dt0");
  }
  {
    auto& m = c.monitors;
    detail::Section s(detail::sub(root, "monitors"), "/monitors");
    if (const Json* v = s.find("delta_list")) {
      if (v->is_string()) {
        if (v->get<std::string>() != "auto") throw ConfigError("/monitors/delta_list must be \"auto\" or an array");
        m.delta_list.reset();
      } else {
        std::vector<double> ds;
        const Json holder{{"delta_list", *v}};
        detail::Section wrap(holder, "/monitors");
        wrap.deltas("delta_list", ds, false);
        m.delta_list = ds;
      }
    }
    s.integer("record_every", m.record_every, 1, 1 << 30);
    s.number("blowup_gradient_factor", m.blowup_gradient_factor, 1.0, 1e300, true);
    s.number("decay_l2_floor", m.decay_l2_floor, 0.0, 1.0, true);
  }
  {
    auto& w = c.well;
    detail::Section s(detail::sub(root, "well"), "/well");
    s.integer("family_size", w.family_size, 0, 10000);
    s.number("eps_min", w.eps_min, 0.0, 10.0);
    s.number("eps_max", w.eps_max, 0.0, 10.0, true);
    s.point("center", w.center);
    s.deltas("delta_grid", w.delta_grid, true);
    s.number("tol_d_rel", w.tol_d_rel, 0.0, 1.0);
    s.integer("lambda_samples", w.lambda_samples, 0, 100000);
    s.seed("lambda_seed", w.lambda_seed);
  }
  {
    auto& k = c.corpus;
    detail::Section s(detail::sub(root, "corpus"), "/corpus");
    s.seed("seed", k.seed);
    s.integer("random_fields", k.random_fields, 0, 100000);
    s.integer("max_mode", k.max_mode, 1, 64);
    if (const Json* v = s.find("bubble_scales")) {
      if (!v->is_array()) throw ConfigError("/corpus/bubble_scales must be an array");
      k.bubble_scales.clear();
      for (const auto& e : *v) {
        if (!e.is_number() || !(e.get<double>() > 0.0)) throw ConfigError("/corpus/bubble_scales entries must be positive");
        k.bubble_scales.push_back(e.get<double>());
      }
    }
    s.integer("directions", k.directions, 0, 100000);
    s.deltas("deltas", k.deltas, true);
    s.number("iso_slack", k.iso_slack, 0.0, 1.0);
    s.number("curve_slack", k.curve_slack, 0.0, 1.0);
    s.number("fiber_rel_tol", k.fiber_rel_tol, 0.0, 1.0, true);
    s.number("identity_rel_tol", k.identity_rel_tol, 0.0, 1.0, true);
  }
  if (const Json* v = root.find("sweep")) {
    SweepConfig sw;
    detail::Section s(*v, "/sweep");
    s.get("parameter", sw.parameter);
    if (const Json* vals = s.find("values")) {
      if (!vals->is_array()) throw ConfigError("/sweep/values must be an array");
      sw.values.assign(vals->begin(), vals->end());
    }
    s.integer("threads", sw.threads, 0, 1024);
    if (sw.parameter.empty() || sw.parameter.front() != '/') {
      throw ConfigError("/sweep/parameter must be a JSON pointer such as /ic/lambda_multiple");
    }
    c.sweep = std::move(sw);
  }
  {
    auto& o = c.output;
    detail::Section s(detail::sub(root, "output"), "/output");
    s.get("path", o.path);
    s.choice("format", o.format, {"csv", "json"});
  }
  return c;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["grid"] = {{"n", c.n}};
  j["physics"] = {{"H", c.H}};
  Json ic = {{"type", c.ic.type},
             {"center", c.ic.center},
             {"scale", c.ic.scale},
             {"amplitude", c.ic.amplitude},
             {"lambda_multiple", c.ic.lambda_multiple},
             {"direction", c.ic.direction},
             {"modes", c.ic.modes},
             {"component", c.ic.component},
             {"max_mode", c.ic.max_mode}};
  if (c.ic.seed) ic["seed"] = *c.ic.seed;
  j["ic"] = ic;
  j["time"] = {{"dt0", c.time.dt0}, {"t_end", c.time.t_end}, {"dt_min", c.time.dt_min}, {"cg_tol", c.time.cg_tol}};
  j["monitors"] = {{"record_every", c.monitors.record_every},
                   {"blowup_gradient_factor", c.monitors.blowup_gradient_factor},
                   {"decay_l2_floor", c.monitors.decay_l2_floor}};
  if (c.monitors.delta_list) {
    j["monitors"]["delta_list"] = *c.monitors.delta_list;
  } else {
    j["monitors"]["delta_list"] = "auto";
  }
  j["well"] = {{"family_size", c.well.family_size}, {"eps_min", c.well.eps_min},
               {"eps_max", c.well.eps_max},         {"center", c.well.center},
               {"delta_grid", c.well.delta_grid},   {"tol_d_rel", c.well.tol_d_rel},
               {"lambda_samples", c.well.lambda_samples}, {"lambda_seed", c.well.lambda_seed}};
  j["corpus"] = {{"seed", c.corpus.seed},
                 {"random_fields", c.corpus.random_fields},
                 {"max_mode", c.corpus.max_mode},
                 {"bubble_scales", c.corpus.bubble_scales},
                 {"directions", c.corpus.directions},
                 {"deltas", c.corpus.deltas},
                 {"iso_slack", c.corpus.iso_slack},
                 {"curve_slack", c.corpus.curve_slack},
                 {"fiber_rel_tol", c.corpus.fiber_rel_tol},
                 {"identity_rel_tol", c.corpus.identity_rel_tol}};
  if (c.sweep) {
    j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}, {"threads", c.sweep->threads}};
  }
  j["output"] = {{"path", c.output.path}, {"format", c.output.format}};
  return j;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

/// Replaces every seed in the document (initial datum, corpus, lambda
/// sampler) with the given value.
inline void override_seed(Json& j, std::uint64_t seed) {
  j["ic"]["seed"] = seed;
  j["corpus"]["seed"] = seed;
  j["well"]["lambda_seed"] = seed;
}

}  // namespace hflow
