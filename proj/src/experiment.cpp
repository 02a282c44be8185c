#include "specsense/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specsense/combinatorics.hpp"
#include "specsense/errors.hpp"
#include "specsense/matrix_diagnostics.hpp"
#include "specsense/metrics.hpp"
#include "specsense/rng.hpp"

namespace specsense {

namespace {

const std::vector<std::string> kValidMethods = {"d-optimal", "e-optimal",
                                                "oracle", "random"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_indices(const std::vector<int>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(idx[i]);
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("scenario")) {
      const auto& s = j.at("scenario");
      cfg.scenario.side_count = s.value("side_count", cfg.scenario.side_count);
      cfg.scenario.area_extent = s.value("area_extent", cfg.scenario.area_extent);
      cfg.scenario.sensor_count =
          s.value("sensor_count", cfg.scenario.sensor_count);
      cfg.scenario.sparsity = s.value("sparsity", cfg.scenario.sparsity);
      cfg.scenario.snr_db = s.value("snr_db", cfg.scenario.snr_db);
    }
    if (j.contains("methods"))
      cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("k_values"))
      cfg.k_values = j.at("k_values").get<std::vector<int>>();
    cfg.trials = j.value("trials", cfg.trials);
    cfg.support_tau = j.value("support_tau", cfg.support_tau);
    cfg.master_seed = j.value("seed", cfg.master_seed);
    cfg.timing = j.value("timing", cfg.timing);
    if (j.contains("lasso")) {
      const auto& l = j.at("lasso");
      cfg.lasso.lambda = l.value("lambda", 0.0);
      cfg.lasso.lambda_scale = l.value("lambda_scale", cfg.lasso.lambda_scale);
      cfg.lasso.max_iterations = l.value("max_iterations", cfg.lasso.max_iterations);
      cfg.lasso.epsilon_floor = l.value("epsilon_floor", cfg.lasso.epsilon_floor);
      cfg.lasso.tolerance = l.value("tolerance", cfg.lasso.tolerance);
    } else {
      cfg.lasso.lambda = 0.0;  // data-scaled default
    }
    if (j.contains("dynamic")) {
      const auto& d = j.at("dynamic");
      DynamicParams dyn;
      dyn.active_count = d.value("k", dyn.active_count);
      dyn.low_rate_denominator =
          d.value("low_rate_denominator", dyn.low_rate_denominator);
      dyn.gamma = d.value("gamma", dyn.gamma);
      dyn.blocks = d.value("blocks", dyn.blocks);
      dyn.forgetting = d.value("forgetting", dyn.forgetting);
      if (d.contains("truth_schedule")) {
        for (const auto& seg : d.at("truth_schedule")) {
          TruthSegmentSpec spec;
          spec.first_block = seg.at("first_block").get<int>();
          spec.last_block = seg.at("last_block").get<int>();
          if (seg.contains("support"))
            spec.support = seg.at("support").get<std::vector<int>>();
          spec.power_value = seg.value("power_value", 1.0);
          dyn.truth_schedule.push_back(std::move(spec));
        }
      }
      if (d.contains("gamma_sweep"))
        dyn.gamma_sweep = d.at("gamma_sweep").get<std::vector<double>>();
      if (d.contains("raster_blocks"))
        dyn.raster_blocks = d.at("raster_blocks").get<std::vector<int>>();
      dyn.raster_resolution = d.value("raster_resolution", dyn.raster_resolution);
      dyn.post_transition_window =
          d.value("post_transition_window", dyn.post_transition_window);
      cfg.dynamic = std::move(dyn);
    }
    if (j.contains("diag")) {
      const auto& d = j.at("diag");
      cfg.diag.rip_order = d.value("rip_order", 0);
      cfg.diag.spark = d.value("spark", false);
      cfg.diag.mean_min_eig_k = d.value("mean_min_eig_k", 0);
      cfg.diag.best_rank_k = d.value("best_rank_k", -1);
      cfg.diag.bound_k = d.value("bound_k", 0);
      if (d.contains("matrix")) {
        const auto& m = d.at("matrix");
        const int rows = m.at("rows").get<int>();
        const int cols = m.at("cols").get<int>();
        const auto data = m.at("data").get<std::vector<double>>();
        if (static_cast<int>(data.size()) != rows * cols)
          throw ConfigError("diag.matrix: data size does not match rows*cols");
        Eigen::MatrixXd mat(rows, cols);
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c)
            mat(r, c) = data[static_cast<std::size_t>(r * cols + c)];
        cfg.diag.matrix = std::move(mat);
      }
    }
    if (j.contains("oracle")) {
      OracleParams oracle;
      oracle.k_values = j.at("oracle").at("k_values").get<std::vector<int>>();
      oracle.objective = j.at("oracle").value("objective", oracle.objective);
      cfg.oracle = std::move(oracle);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

namespace {

void validate_methods(const std::vector<std::string>& methods) {
  for (const auto& m : methods) {
    if (std::find(kValidMethods.begin(), kValidMethods.end(), m) ==
        kValidMethods.end()) {
      std::string valid;
      for (const auto& v : kValidMethods) {
        if (!valid.empty()) valid += ", ";
        valid += v;
      }
      throw ConfigError("unknown method '" + m + "' (valid: " + valid + ")");
    }
  }
}

struct TrialRow {
  std::string method;
  int k;
  int trial;
  bool success;
  double normalized_error;
  double spurious;
  double wall_ms;
};

RecoveryResult recover(const Scenario& sc, const Eigen::VectorXd& y,
                       const std::vector<int>& selection,
                       const LassoConfig& lasso) {
  LassoConfig cfg = lasso;
  if (cfg.lambda <= 0.0)
    cfg.lambda = default_lasso_lambda(sc.gain, y, selection, cfg.lambda_scale);
  if (cfg.lambda <= 0.0) cfg.lambda = 1e-12;
  return irls_lasso(sc.gain, y, selection, cfg);
}

}  // namespace

StaticSweepOutput run_static_sweep(const ExperimentConfig& cfg) {
  validate_methods(cfg.methods);
  if (cfg.k_values.empty()) throw ConfigError("k_values must be nonempty");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.scenario.sparsity < 1)
    throw ConfigError("static sweep requires sparsity >= 1");
  for (const int k : cfg.k_values)
    if (k < 1 || k > cfg.scenario.sensor_count)
      throw ConfigError("k_values must lie in [1, sensor_count]");

  const int k_max = *std::max_element(cfg.k_values.begin(), cfg.k_values.end());
  const GridSpec grid{cfg.scenario.side_count, cfg.scenario.area_extent};

  std::vector<TrialRow> rows;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const Scenario sc =
        build_scenario(grid, cfg.scenario.sensor_count, cfg.scenario.sparsity,
                       cfg.scenario.snr_db,
                       derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial), 0, "scenario"));
    const MeasurementSet meas = sample_measurements(
        sc, derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial), 0, "measure"));
    const std::vector<int> true_support = [&] {
      std::vector<int> s;
      for (int i = 0; i < sc.grid_point_count(); ++i)
        if (sc.true_power(i) != 0.0) s.push_back(i);
      return s;
    }();

    for (const auto& method : cfg.methods) {
      // Greedy selections nest: the K-prefix of a K_max run is the K run
      // under the same seed, so one sweep per trial serves every K.
      std::vector<int> greedy_order;
      if (method == "e-optimal" || method == "d-optimal") {
        const auto seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial), 0,
                                      "select-" + method);
        greedy_order = method == "e-optimal"
                           ? greedy_eoptimal(sc.gain, k_max, std::nullopt, seed).selected
                           : greedy_doptimal(sc.gain, k_max, std::nullopt, seed).selected;
      }

      for (const int k : cfg.k_values) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<int> selection;
        if (!greedy_order.empty()) {
          selection.assign(greedy_order.begin(), greedy_order.begin() + k);
        } else if (method == "random") {
          selection = random_selection(
                          cfg.scenario.sensor_count, k,
                          derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial),
                                      static_cast<std::uint64_t>(k), "select-random"))
                          .selected;
        } else {  // oracle
          selection =
              oracle_best_subset(sc.gain, k, SelectionObjective::MinEig).selected;
        }

        const RecoveryResult rec = recover(sc, meas.values, selection, cfg.lasso);
        TrialRow row;
        row.method = method;
        row.k = k;
        row.trial = trial;
        row.success = recovery_success(rec.estimate, sc.true_power, cfg.support_tau);
        row.normalized_error = normalized_error(rec.estimate, sc.true_power);
        row.spurious = spurious_power(rec.estimate, true_support);
        row.wall_ms = cfg.timing ? elapsed_ms(start) : 0.0;
        rows.push_back(std::move(row));
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tie(a.method, a.k, a.trial) < std::tie(b.method, b.k, b.trial);
  });

  std::ostringstream trials_csv;
  trials_csv << "method,k,trial,success,normalized_error,spurious_power,wall_ms\n";
  for (const auto& r : rows)
    trials_csv << r.method << ',' << r.k << ',' << r.trial << ','
               << (r.success ? 1 : 0) << ',' << fmt(r.normalized_error) << ','
               << fmt(r.spurious) << ',' << fmt(r.wall_ms) << '\n';

  struct Agg {
    int n = 0;
    int successes = 0;
    double err = 0.0;
    double spur = 0.0;
  };
  std::map<std::pair<std::string, int>, Agg> aggregates;
  for (const auto& r : rows) {
    auto& a = aggregates[{r.method, r.k}];
    ++a.n;
    a.successes += r.success ? 1 : 0;
    a.err += r.normalized_error;
    a.spur += r.spurious;
  }
  std::ostringstream summary_csv;
  summary_csv << "method,k,trials,success_rate,mean_normalized_error,"
                 "mean_spurious_power\n";
  for (const auto& [key, a] : aggregates)
    summary_csv << key.first << ',' << key.second << ',' << a.n << ','
                << fmt(static_cast<double>(a.successes) / a.n) << ','
                << fmt(a.err / a.n) << ',' << fmt(a.spur / a.n) << '\n';

  return {trials_csv.str(), summary_csv.str()};
}

std::vector<TruthSegment> resolve_truth_schedule(const ExperimentConfig& cfg,
                                                 int grid_points) {
  if (!cfg.dynamic) throw ConfigError("config has no dynamic block");
  const auto& dyn = *cfg.dynamic;
  if (dyn.truth_schedule.empty())
    throw ConfigError("dynamic.truth_schedule must be nonempty");

  std::vector<TruthSegment> schedule;
  int expected_start = 0;
  for (std::size_t i = 0; i < dyn.truth_schedule.size(); ++i) {
    const auto& spec = dyn.truth_schedule[i];
    if (spec.first_block != expected_start || spec.last_block < spec.first_block)
      throw ConfigError("dynamic.truth_schedule must cover blocks contiguously");
    expected_start = spec.last_block + 1;

    TruthSegment seg;
    seg.first_block = spec.first_block;
    seg.last_block = spec.last_block;
    seg.power = Eigen::VectorXd::Zero(grid_points);
    std::vector<int> support = spec.support;
    if (support.empty()) {
      // Per-state support drawn from the master seed.
      Rng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i), 0, "truth"));
      std::vector<int> slots(static_cast<std::size_t>(grid_points));
      std::iota(slots.begin(), slots.end(), 0);
      for (int s = 0; s < cfg.scenario.sparsity; ++s) {
        const auto pick =
            s + static_cast<int>(rng.below(static_cast<std::uint64_t>(grid_points - s)));
        std::swap(slots[static_cast<std::size_t>(s)], slots[static_cast<std::size_t>(pick)]);
        support.push_back(slots[static_cast<std::size_t>(s)]);
      }
    }
    for (const int s : support) {
      if (s < 0 || s >= grid_points)
        throw ConfigError("dynamic.truth_schedule support index out of range");
      seg.power(s) = spec.power_value;
    }
    schedule.push_back(std::move(seg));
  }
  if (expected_start < dyn.blocks)
    throw ConfigError("dynamic.truth_schedule does not cover all blocks");
  return schedule;
}

namespace {

nlohmann::json record_to_json(const TimeBlockRecord& rec) {
  nlohmann::json j;
  j["t"] = rec.t;
  j["active_set"] = rec.active_set;
  j["estimate"] = std::vector<double>(rec.estimate.data(),
                                      rec.estimate.data() + rec.estimate.size());
  j["reliability"] = std::vector<double>(
      rec.reliability.data(), rec.reliability.data() + rec.reliability.size());
  j["sampled_low_rate"] = rec.sampled_low_rate;
  return j;
}

int state_at(const std::vector<TruthSegment>& schedule, int t) {
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (schedule[i].first_block <= t && t <= schedule[i].last_block)
      return static_cast<int>(i);
  return -1;
}

std::string summarize_blocks(const std::vector<TimeBlockRecord>& records,
                             const std::vector<TruthSegment>& schedule) {
  std::ostringstream csv;
  csv << "t,state,normalized_error,mean_reliability,spurious_power,active_set\n";
  for (const auto& rec : records) {
    const auto& truth = schedule[static_cast<std::size_t>(state_at(schedule, rec.t))];
    std::vector<int> support;
    for (int i = 0; i < truth.power.size(); ++i)
      if (truth.power(i) != 0.0) support.push_back(i);
    csv << rec.t << ',' << state_at(schedule, rec.t) << ','
        << fmt(normalized_error(rec.estimate, truth.power)) << ','
        << fmt(mean_reliability(rec.reliability)) << ','
        << fmt(spurious_power(rec.estimate, support)) << ','
        << join_indices(rec.active_set) << '\n';
  }
  return csv.str();
}

double mean_post_transition_error(const std::vector<TimeBlockRecord>& records,
                                  const std::vector<TruthSegment>& schedule,
                                  int window) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const int start = schedule[i].first_block;
    for (int t = start; t < start + window &&
                        t < static_cast<int>(records.size()); ++t) {
      const auto& truth = schedule[static_cast<std::size_t>(state_at(schedule, t))];
      sum += normalized_error(records[static_cast<std::size_t>(t)].estimate,
                              truth.power);
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

double mean_final_state_reliability(const std::vector<TimeBlockRecord>& records,
                                    const std::vector<TruthSegment>& schedule) {
  const auto& last = schedule.back();
  double sum = 0.0;
  int count = 0;
  for (int t = last.first_block;
       t <= last.last_block && t < static_cast<int>(records.size()); ++t) {
    sum += mean_reliability(records[static_cast<std::size_t>(t)].reliability);
    ++count;
  }
  return count ? sum / count : 0.0;
}

}  // namespace

DynamicOutput run_dynamic_experiment(const ExperimentConfig& cfg) {
  if (!cfg.dynamic) throw ConfigError("config has no dynamic block");
  const auto& dyn = *cfg.dynamic;
  if (cfg.scenario.sparsity < 1)
    throw ConfigError("dynamic experiment requires sparsity >= 1");

  const GridSpec grid{cfg.scenario.side_count, cfg.scenario.area_extent};
  const Scenario sc =
      build_scenario(grid, cfg.scenario.sensor_count, cfg.scenario.sparsity,
                     cfg.scenario.snr_db, derive_seed(cfg.master_seed, 0, 0, "scenario"));
  const auto schedule = resolve_truth_schedule(cfg, sc.grid_point_count());

  OnlineConfig online;
  online.active_count = dyn.active_count;
  online.low_rate_denominator = dyn.low_rate_denominator;
  online.gamma = dyn.gamma;
  online.blocks = dyn.blocks;
  online.forgetting = dyn.forgetting;
  online.lasso = cfg.lasso;
  online.seed = derive_seed(cfg.master_seed, 0, 0, "online");

  const auto records = run_online(sc, schedule, online);

  OnlineConfig baseline_cfg = online;  // identical seed stream, gamma = 0
  baseline_cfg.gamma = 0.0;
  const auto baseline = run_online(sc, schedule, baseline_cfg);

  DynamicOutput out;
  std::ostringstream trace, baseline_trace;
  for (const auto& rec : records) trace << record_to_json(rec).dump() << '\n';
  for (const auto& rec : baseline)
    baseline_trace << record_to_json(rec).dump() << '\n';
  out.trace_jsonl = trace.str();
  out.baseline_trace_jsonl = baseline_trace.str();
  out.summary_csv = summarize_blocks(records, schedule);
  out.baseline_summary_csv = summarize_blocks(baseline, schedule);

  for (const int t : dyn.raster_blocks) {
    if (t < 0 || t >= static_cast<int>(records.size()))
      throw ConfigError("raster block index out of range");
    const auto& rec = records[static_cast<std::size_t>(t)];
    const auto& base = baseline[static_cast<std::size_t>(t)];
    out.rasters.emplace_back(
        "reliability_map_block_" + std::to_string(t) + ".pgm",
        to_pgm_string(reliability_raster(sc, rec.reliability, dyn.raster_resolution)));
    out.rasters.emplace_back(
        "baseline_reliability_map_block_" + std::to_string(t) + ".pgm",
        to_pgm_string(reliability_raster(sc, base.reliability, dyn.raster_resolution)));
  }

  if (!dyn.gamma_sweep.empty()) {
    std::ostringstream sweep;
    sweep << "gamma,mean_post_transition_error,final_state_mean_reliability\n";
    for (const double gamma : dyn.gamma_sweep) {
      OnlineConfig sweep_cfg = online;
      sweep_cfg.gamma = gamma;
      const auto sweep_records = run_online(sc, schedule, sweep_cfg);
      sweep << fmt(gamma) << ','
            << fmt(mean_post_transition_error(sweep_records, schedule,
                                              dyn.post_transition_window))
            << ',' << fmt(mean_final_state_reliability(sweep_records, schedule))
            << '\n';
    }
    out.gamma_sweep_csv = sweep.str();
  }
  return out;
}

nlohmann::json run_diagnostics(const ExperimentConfig& cfg) {
  Eigen::MatrixXd matrix;
  nlohmann::json report;
  if (cfg.diag.matrix) {
    matrix = *cfg.diag.matrix;
    report["source"] = "explicit matrix";
  } else {
    const GridSpec grid{cfg.scenario.side_count, cfg.scenario.area_extent};
    const Scenario sc =
        build_scenario(grid, cfg.scenario.sensor_count, cfg.scenario.sparsity,
                       cfg.scenario.snr_db, derive_seed(cfg.master_seed, 0, 0, "scenario"));
    matrix = sc.gain;
    report["source"] = "scenario gain matrix";
  }
  report["rows"] = matrix.rows();
  report["cols"] = matrix.cols();

  const auto guarded = [&](const char* key, auto&& compute) {
    try {
      report[key] = compute();
    } catch (const CapacityError& e) {
      report[key] = {{"error", e.what()}};
    }
  };

  if (cfg.diag.rip_order > 0)
    guarded("rip", [&]() -> nlohmann::json {
      const RipReport rip = rip_constants(matrix, cfg.diag.rip_order);
      return {{"order", rip.order},
              {"delta_lower", rip.delta_lower},
              {"delta_upper", rip.delta_upper},
              {"argmin_subset", rip.argmin_subset}};
    });
  if (cfg.diag.spark)
    guarded("spark", [&]() -> nlohmann::json { return spark(matrix); });
  if (cfg.diag.mean_min_eig_k > 0)
    guarded("mean_min_eig", [&]() -> nlohmann::json {
      return {{"k", cfg.diag.mean_min_eig_k},
              {"value", mean_min_eig(matrix, cfg.diag.mean_min_eig_k)}};
    });
  if (cfg.diag.best_rank_k >= 0)
    guarded("best_rank_k_error", [&]() -> nlohmann::json {
      return {{"k", cfg.diag.best_rank_k},
              {"value", best_rank_k_error(matrix, cfg.diag.best_rank_k)}};
    });
  if (cfg.diag.bound_k > 0)
    guarded("eopt_bound", [&]() -> nlohmann::json {
      const auto diag = eoptimal_bound_diagnostic(matrix, cfg.diag.bound_k);
      return {{"k", cfg.diag.bound_k},
              {"expected_residual", diag.expected_residual},
              {"bound_without_constant", diag.bound_without_constant}};
    });
  return report;
}

std::string run_oracle_check(const ExperimentConfig& cfg) {
  if (!cfg.oracle) throw ConfigError("config has no oracle block");
  const auto& params = *cfg.oracle;
  if (params.k_values.empty())
    throw ConfigError("oracle.k_values must be nonempty");
  SelectionObjective objective;
  if (params.objective == "min-eig") {
    objective = SelectionObjective::MinEig;
  } else if (params.objective == "log-det") {
    objective = SelectionObjective::LogDet;
  } else {
    throw ConfigError("oracle.objective must be min-eig or log-det");
  }

  const GridSpec grid{cfg.scenario.side_count, cfg.scenario.area_extent};
  const Scenario sc =
      build_scenario(grid, cfg.scenario.sensor_count, cfg.scenario.sparsity,
                     cfg.scenario.snr_db, derive_seed(cfg.master_seed, 0, 0, "scenario"));

  std::ostringstream csv;
  csv << "k,objective,greedy_objective,oracle_objective,greedy_subset,"
         "oracle_subset,volume_expected_residual,projection_bound,bound_holds\n";
  for (const int k : params.k_values) {
    const auto seed = derive_seed(cfg.master_seed, 0, static_cast<std::uint64_t>(k),
                                  "select-e-optimal");
    const SelectionResult greedy =
        objective == SelectionObjective::MinEig
            ? greedy_eoptimal(sc.gain, k, std::nullopt, seed)
            : greedy_doptimal(sc.gain, k, std::nullopt, seed);
    const SelectionResult oracle = oracle_best_subset(sc.gain, k, objective);
    const double expected =
        expected_projection_error(sc.gain, volume_distribution(sc.gain, k));
    const double bound = (k + 1) * best_rank_k_error(sc.gain, k);
    csv << k << ',' << params.objective << ','
        << fmt(greedy.objective_trace.back()) << ','
        << fmt(oracle.objective_trace.back()) << ','
        << join_indices(greedy.selected) << ',' << join_indices(oracle.selected)
        << ',' << fmt(expected) << ',' << fmt(bound) << ','
        << (expected <= bound + 1e-9 ? 1 : 0) << '\n';
  }
  return csv.str();
}

}  // namespace specsense
