#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hflow/commands.hpp"

namespace {

hflow::ExperimentConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  hflow::Json j = hflow::read_json_file(path);
  if (seed) hflow::override_seed(j, *seed);
  return hflow::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat flow of the constant-H H-system on the unit square"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (defaults to output.path)");
    sub->add_option("--seed", seed, "override every seed in the configuration");
  };
  auto* simulate = app.add_subcommand("simulate", "classify u0, run the flow, write CSV + verdict");
  auto* classify = app.add_subcommand("classify", "classify u0 without running the flow");
  auto* well = app.add_subcommand("compute-well-depth", "estimate d and tabulate d(delta)");
  auto* lemmas = app.add_subcommand("verify-lemmas", "run the structural checks over a seeded corpus");
  auto* sweep = app.add_subcommand("sweep", "one simulation per value of a configuration parameter");
  for (auto* sub : {simulate, classify, well, lemmas, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hflow::kExitOk : hflow::kExitConfig;
  }

  try {
    const hflow::ExperimentConfig cfg = load(config_path, seed);
    const std::filesystem::path out = out_dir.empty() ? std::filesystem::path(cfg.output.path) : std::filesystem::path(out_dir);

    if (*simulate) {
      const auto res = hflow::cmd_simulate(cfg, out);
      std::printf("%s: %s (expected %s, %s)\n", out.string().c_str(), hflow::to_string(res.record.status),
                  hflow::to_string(res.verdict.expected), hflow::to_string(res.verdict.theorem));
    } else if (*classify) {
      const auto v = hflow::cmd_classify(cfg, out);
      std::printf("%s: regime %s, well %s, %s, expected %s\n", out.string().c_str(), hflow::to_string(v.regime),
                  hflow::to_string(v.well), hflow::to_string(v.theorem), hflow::to_string(v.expected));
    } else if (*well) {
      const auto wp = hflow::cmd_compute_well_depth(cfg, out);
      std::printf("d = %.17g (%s)\n", wp.d, wp.provenance.c_str());
    } else if (*lemmas) {
      const auto rep = hflow::cmd_verify_lemmas(cfg, out);
      for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      for (const auto& r : rep.results) {
        std::printf("%-24s %s  checked %zu  failures %zu\n", r.name.c_str(), r.passed ? "pass" : "FAIL", r.checked,
                    r.failures);
        for (const auto& item : r.items) std::printf("    %s\n", item.c_str());
      }
      return rep.all_passed() ? hflow::kExitOk : hflow::kExitLemma;
    } else if (*sweep) {
      const auto cells = hflow::cmd_sweep(cfg, out);
      for (const auto& c : cells) {
        std::printf("%s %s: %s\n", c.dir.c_str(), c.value.dump().c_str(),
                    c.error ? c.error->c_str() : hflow::to_string(c.result->record.status));
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return hflow::exit_code_for(e);
  }
  return hflow::kExitOk;
}
