#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specsense/errors.hpp"
#include "specsense/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool timing = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--seed", args.seed, "master seed override");
  sub->add_option("--trials", args.trials, "trial count override");
  sub->add_flag("--timing", args.timing,
                "record wall-clock times (makes outputs non-reproducible)");
}

specsense::ExperimentConfig load(const CommonArgs& args) {
  std::ifstream in(args.config_path);
  nlohmann::json j;
  in >> j;
  auto cfg = specsense::config_from_json(j);
  if (args.seed) cfg.master_seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.timing) cfg.timing = true;
  return cfg;
}

void write_file(const fs::path& dir, const std::string& name,
                const std::string& content) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed to write " + (dir / name).string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressive spectrum sensing: sensor selection experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* static_cmd =
      app.add_subcommand("static", "measurement-independent selection sweep");
  auto* dynamic_cmd =
      app.add_subcommand("dynamic", "online reliability-driven selection run");
  auto* diag_cmd = app.add_subcommand("diag", "matrix diagnostics report");
  auto* oracle_cmd =
      app.add_subcommand("oracle", "exhaustive-enumeration cross-checks");
  for (auto* sub : {static_cmd, dynamic_cmd, diag_cmd, oracle_cmd})
    add_common(sub, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(args);
    const fs::path out_dir(args.out_dir);

    if (static_cmd->parsed()) {
      const auto result = specsense::run_static_sweep(cfg);
      write_file(out_dir, "static_trials.csv", result.trials_csv);
      write_file(out_dir, "static_summary.csv", result.summary_csv);
    } else if (dynamic_cmd->parsed()) {
      const auto result = specsense::run_dynamic_experiment(cfg);
      write_file(out_dir, "dynamic_trace.jsonl", result.trace_jsonl);
      write_file(out_dir, "dynamic_summary.csv", result.summary_csv);
      write_file(out_dir, "baseline_trace.jsonl", result.baseline_trace_jsonl);
      write_file(out_dir, "baseline_summary.csv", result.baseline_summary_csv);
      if (!result.gamma_sweep_csv.empty())
        write_file(out_dir, "gamma_sweep.csv", result.gamma_sweep_csv);
      for (const auto& [name, pgm] : result.rasters)
        write_file(out_dir, name, pgm);
    } else if (diag_cmd->parsed()) {
      write_file(out_dir, "diag_report.json",
                 specsense::run_diagnostics(cfg).dump(2) + "\n");
    } else if (oracle_cmd->parsed()) {
      write_file(out_dir, "oracle_check.csv", specsense::run_oracle_check(cfg));
    }
  } catch (const specsense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
