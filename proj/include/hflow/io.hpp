#pragma once

// Serialization of trajectories (CSV or JSON), verdicts, well parameters and
// lemma reports, plus a strict reader for the trajectory CSV layout.
//
// CSV columns, in order:
//   t,dt,l2_sq,h1_sq,E,D,D_delta_<delta>...,f,fprime,fsecond,concavity,energy_residual
// Values use %.17g; lines end with LF.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hflow/classify.hpp"
#include "hflow/error.hpp"
#include "hflow/flow.hpp"
#include "hflow/lemmas.hpp"
#include "hflow/nehari.hpp"

namespace hflow {

using Json = nlohmann::json;

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Shortest representation that reads back to the same double; used for
/// the delta labels in column names.
inline std::string short_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> csv_columns(std::span<const double> deltas) {
  std::vector<std::string> cols{"t", "dt", "l2_sq", "h1_sq", "E", "D"};
  for (double d : deltas) cols.push_back("D_delta_" + short_double(d));
  for (const char* c : {"f", "fprime", "fsecond", "concavity", "energy_residual"}) cols.emplace_back(c);
  return cols;
}

inline std::string trajectory_csv(const TrajectoryRecord& tr) {
  std::string out;
  const auto cols = csv_columns(tr.deltas);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (k) out += ',';
    out += cols[k];
  }
  out += '\n';
  for (const auto& s : tr.samples) {
    std::vector<double> row{s.t, s.dt, s.l2_sq, s.h1_sq, s.energy, s.nehari};
    row.insert(row.end(), s.nehari_delta.begin(), s.nehari_delta.end());
    row.insert(row.end(), {s.f, s.fprime, s.fsecond, s.concavity, s.energy_residual});
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<double> deltas;
  std::vector<std::vector<double>> rows;
};

/// Parses a trajectory CSV and checks it against the documented layout:
/// exact column names and order, LF endings, one finite-or-not double per
/// cell, nondecreasing t.
inline CsvTable parse_trajectory_csv(std::string_view text) {
  if (text.find('\r') != std::string_view::npos) throw SchemaError("CSV must use LF line endings");
  CsvTable tab;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw SchemaError("CSV must end with a newline");
    line = text.substr(pos, nl - pos);
    pos = nl + 1;
    return true;
  };
  auto split = [](std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto c = line.find(',', start);
      cells.push_back(line.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start));
      if (c == std::string_view::npos) break;
      start = c + 1;
    }
    return cells;
  };

  std::string_view header;
  if (!next_line(header)) throw SchemaError("CSV is empty");
  for (auto c : split(header)) tab.columns.emplace_back(c);
  const std::vector<std::string> fixed_head{"t", "dt", "l2_sq", "h1_sq", "E", "D"};
  const std::vector<std::string> fixed_tail{"f", "fprime", "fsecond", "concavity", "energy_residual"};
  if (tab.columns.size() < fixed_head.size() + fixed_tail.size()) throw SchemaError("CSV header too short");
  for (std::size_t k = 0; k < fixed_head.size(); ++k)
    if (tab.columns[k] != fixed_head[k]) throw SchemaError("column " + std::to_string(k) + " must be " + fixed_head[k]);
  const std::size_t nd = tab.columns.size() - fixed_head.size() - fixed_tail.size();
  for (std::size_t k = 0; k < nd; ++k) {
    const std::string& name = tab.columns[fixed_head.size() + k];
    const std::string prefix = "D_delta_";
    if (name.rfind(prefix, 0) != 0) throw SchemaError("expected a D_delta_<delta> column, got " + name);
    const std::string label = name.substr(prefix.size());
    double d = 0.0;
    const auto res = std::from_chars(label.data(), label.data() + label.size(), d);
    if (res.ec != std::errc() || res.ptr != label.data() + label.size() || !(d > 0.0 && d < 1.5)) {
      throw SchemaError("bad delta label in column " + name);
    }
    tab.deltas.push_back(d);
  }
  for (std::size_t k = 0; k < fixed_tail.size(); ++k)
    if (tab.columns[fixed_head.size() + nd + k] != fixed_tail[k]) {
      throw SchemaError("column " + std::to_string(fixed_head.size() + nd + k) + " must be " + fixed_tail[k]);
    }

  std::string_view line;
  while (next_line(line)) {
    const auto cells = split(line);
    if (cells.size() != tab.columns.size()) {
      throw SchemaError("row " + std::to_string(tab.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(tab.columns.size()));
    }
    std::vector<double> row;
    for (auto c : cells) {
      const std::string cell(c);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) throw SchemaError("non-numeric cell \"" + cell + "\"");
      row.push_back(v);
    }
    if (!tab.rows.empty() && row[0] < tab.rows.back()[0]) throw SchemaError("t must be nondecreasing");
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

inline Json trajectory_json(const TrajectoryRecord& tr) {
  Json samples = Json::array();
  for (const auto& s : tr.samples) {
    samples.push_back({{"t", s.t},
                       {"dt", s.dt},
                       {"l2_sq", s.l2_sq},
                       {"h1_sq", s.h1_sq},
                       {"E", s.energy},
                       {"D", s.nehari},
                       {"D_delta", s.nehari_delta},
                       {"f", s.f},
                       {"fprime", s.fprime},
                       {"fsecond", s.fsecond},
                       {"concavity", s.concavity},
                       {"energy_residual", s.energy_residual}});
  }
  return {{"H", tr.H}, {"deltas", tr.deltas}, {"samples", samples}};
}

inline Json run_summary_json(const TrajectoryRecord& tr) {
  const auto b = blowup_report(tr);
  Json blow = {{"suspected", b.suspected},
               {"t_last", b.t_last},
               {"gradient_max", b.gradient_max},
               {"dt_collapse", b.dt_collapse},
               {"gradient_threshold", b.gradient_threshold}};
  blow["concavity_positive_from"] =
      b.concavity_positive_from ? Json(*b.concavity_positive_from) : Json(nullptr);
  const auto sp = check_sign_persistence(tr);
  Json persistence = Json::array();
  for (const auto& e : sp.entries) {
    persistence.push_back({{"delta", e.delta},
                           {"sign", e.sign},
                           {"persistent", e.persistent},
                           {"first_violation", e.first_violation ? Json(*e.first_violation) : Json(nullptr)}});
  }
  return {{"status", to_string(tr.status)},
          {"stop_reason", to_string(tr.reason)},
          {"accepted_steps", tr.accepted_steps},
          {"rejected_steps", tr.rejected_steps},
          {"samples", tr.samples.size()},
          {"t_final", tr.samples.empty() ? 0.0 : tr.samples.back().t},
          {"energy_residual", tr.samples.empty() ? 0.0 : tr.samples.back().energy_residual},
          {"blowup", blow},
          {"sign_persistence", persistence}};
}

inline Json to_json(const E54Check& e) {
  return {{"satisfied", e.satisfied},
          {"E", e.energy},
          {"l2", e.l2},
          {"volume_bound", e.volume_bound},
          {"D", e.nehari},
          {"identity_residual", e.identity_residual},
          {"D_negative", e.nehari_negative}};
}

inline Json to_json(const Verdict& v) {
  const auto& d = v.details;
  Json det = {{"E0", d.energy},       {"D0", d.nehari},     {"dirichlet0", d.dirichlet},
              {"l2_0", d.l2},         {"d", d.d},           {"tol_d", d.tol_d},
              {"zero_tol", d.zero_tol}, {"heuristic", d.heuristic}, {"e54", to_json(d.e54)},
              {"notes", d.notes}};
  det["delta1"] = d.delta1 ? Json(*d.delta1) : Json(nullptr);
  det["delta2"] = d.delta2 ? Json(*d.delta2) : Json(nullptr);
  if (d.lambda) {
    det["lambda_hat"] = d.lambda->lambda_hat;
    det["Lambda_hat"] = d.lambda->Lambda_hat;
    det["lambda_provenance"] = d.lambda->provenance;
  }
  return {{"energy_regime", to_string(v.regime)},
          {"well", to_string(v.well)},
          {"applicable_theorem", to_string(v.theorem)},
          {"expected_outcome", to_string(v.expected)},
          {"details", det}};
}

inline Json to_json(const WellParameters& wp, std::span<const double> delta_grid) {
  Json members = Json::array();
  for (const auto& m : wp.members) {
    members.push_back({{"label", m.label},
                       {"A", m.coeffs.A},
                       {"B", m.coeffs.B},
                       {"fiber_max", m.fiber_max ? Json(*m.fiber_max) : Json(nullptr)}});
  }
  Json curve = Json::array();
  for (double delta : delta_grid) {
    curve.push_back({{"delta", delta},
                     {"d_delta", d_of_delta(delta, wp.d)},
                     {"lower_bound", a_of_delta(delta) * std::pow(r_of_delta(delta, wp.H), 2)}});
  }
  Json j = {{"H", wp.H},
            {"d", wp.d},
            {"provenance", wp.provenance},
            {"best_index", wp.best_index},
            {"best_label", wp.members.at(wp.best_index).label},
            {"lower_bound", a_of_delta(1.0) * std::pow(r_of_delta(1.0, wp.H), 2)},
            {"members", members},
            {"curve", curve}};
  j["delta1"] = wp.delta1 ? Json(*wp.delta1) : Json(nullptr);
  j["delta2"] = wp.delta2 ? Json(*wp.delta2) : Json(nullptr);
  return j;
}

inline Json to_json(const LemmaReport& rep) {
  Json results = Json::array();
  for (const auto& r : rep.results) {
    results.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"checked", r.checked},
                       {"failures", r.failures},
                       {"worst_slack", r.checked ? Json(r.worst_slack) : Json(nullptr)},
                       {"items", r.items}});
  }
  return {{"all_passed", rep.all_passed()}, {"results", results}, {"warnings", rep.warnings}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hflow
