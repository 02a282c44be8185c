#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specsense/dynamic_selection.hpp"
#include "specsense/scenario.hpp"

namespace specsense {

struct ScenarioParams {
  int side_count = 6;
  double area_extent = 10.0;
  int sensor_count = 100;
  int sparsity = 5;
  double snr_db = 20.0;
};

struct TruthSegmentSpec {
  int first_block = 0;
  int last_block = 0;
  std::vector<int> support;  // empty: drawn from the master seed
  double power_value = 1.0;
};

struct DynamicParams {
  int active_count = 8;
  int low_rate_denominator = 30;
  double gamma = 0.7;
  int blocks = 90;
  double forgetting = 0.1;
  std::vector<TruthSegmentSpec> truth_schedule;
  std::vector<double> gamma_sweep;
  std::vector<int> raster_blocks;
  int raster_resolution = 24;
  int post_transition_window = 10;
};

struct DiagParams {
  int rip_order = 0;        // 0: skip
  bool spark = false;
  int mean_min_eig_k = 0;   // 0: skip
  int best_rank_k = -1;     // -1: skip
  int bound_k = 0;          // 0: skip Theorem-style bound diagnostic
  std::optional<Eigen::MatrixXd> matrix;  // overrides the scenario gain
};

struct OracleParams {
  std::vector<int> k_values;
  std::string objective = "min-eig";  // or "log-det"
};

struct ExperimentConfig {
  ScenarioParams scenario;
  std::vector<std::string> methods{"e-optimal", "random"};
  std::vector<int> k_values;
  int trials = 100;
  double support_tau = 0.05;
  LassoConfig lasso;  // lasso.lambda <= 0 selects the data-scaled default
  std::optional<DynamicParams> dynamic;
  DiagParams diag;
  std::optional<OracleParams> oracle;
  std::uint64_t master_seed = 1;
  // Off by default: measured wall time is the one output that cannot be
  // byte-reproducible, so it is opt-in.
  bool timing = false;
};

ExperimentConfig config_from_json(const nlohmann::json& j);

struct StaticSweepOutput {
  std::string trials_csv;   // method,k,trial,success,normalized_error,...
  std::string summary_csv;  // per-(method,k) aggregates
};

StaticSweepOutput run_static_sweep(const ExperimentConfig& cfg);

struct DynamicOutput {
  std::string trace_jsonl;
  std::string summary_csv;
  std::string baseline_trace_jsonl;  // gamma = 0 under the same seed stream
  std::string baseline_summary_csv;
  std::string gamma_sweep_csv;       // empty when no sweep configured
  std::vector<std::pair<std::string, std::string>> rasters;  // name -> PGM
};

DynamicOutput run_dynamic_experiment(const ExperimentConfig& cfg);

nlohmann::json run_diagnostics(const ExperimentConfig& cfg);

std::string run_oracle_check(const ExperimentConfig& cfg);  // CSV

// Resolved truth schedule for a dynamic run (exposed for tests).
std::vector<TruthSegment> resolve_truth_schedule(const ExperimentConfig& cfg,
                                                 int grid_points);

}  // namespace specsense
