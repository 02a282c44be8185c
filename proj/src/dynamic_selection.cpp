#include "specsense/dynamic_selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specsense/rng.hpp"
#include "specsense/scenario.hpp"

namespace specsense {

ReliabilityState ReliabilityState::fresh(const Eigen::VectorXd& y0,
                                         double forgetting) {
  ReliabilityState state;
  const auto m = y0.size();
  state.r = Eigen::VectorXd::Ones(m);
  state.u = Eigen::VectorXd::Ones(m);
  state.t_last.assign(static_cast<std::size_t>(m), 0);
  state.y_last = y0;
  state.forgetting = forgetting;
  return state;
}

double predict_measurement(const Eigen::MatrixXd& A, int sensor,
                           const Eigen::VectorXd& x_prev) {
  if (x_prev.size() != A.cols())
    throw std::invalid_argument("predict_measurement: x_prev length mismatch");
  if (sensor < 0 || sensor >= A.rows())
    throw std::invalid_argument("predict_measurement: sensor out of range");
  return A.row(sensor).dot(x_prev);
}

ReliabilityState update_reliability(const ReliabilityState& state, int t,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& x_prev) {
  const auto m = state.y_last.size();
  ReliabilityState next = state;
  for (Eigen::Index i = 0; i < m; ++i) {
    const int age = t - state.t_last[static_cast<std::size_t>(i)];
    if (age < 0)
      throw std::invalid_argument("update_reliability: t precedes a t_last entry");
    const double prediction = predict_measurement(A, static_cast<int>(i), x_prev);
    const double mismatch = state.y_last(i) - prediction;
    const double raw = std::exp(-state.forgetting * age) /
                       (1.0 + mismatch * mismatch);
    next.r(i) = std::clamp(raw, kReliabilityFloor, 1.0);
    next.u(i) = 1.0 / next.r(i);
  }
  return next;
}

SelectionResult reliable_greedy_select(const Eigen::MatrixXd& A,
                                       const Eigen::VectorXd& unreliability,
                                       int k, double gamma, std::uint64_t seed,
                                       std::optional<int> init) {
  return detail::greedy_min_eig_core(A, k, init, seed, gamma, &unreliability,
                                     /*scored_first_pick=*/true,
                                     "reliable-eopt-greedy");
}

std::vector<int> low_rate_schedule(int sensor_count, int n_l, int t) {
  if (n_l < 1)
    throw std::invalid_argument("low_rate_schedule: n_l must be >= 1");
  if (t < 0) throw std::invalid_argument("low_rate_schedule: t must be >= 0");
  std::vector<int> observed;
  for (int m = 0; m < sensor_count; ++m)
    if (m % n_l == t % n_l) observed.push_back(m);
  return observed;
}

namespace {

const Eigen::VectorXd& truth_at(std::span<const TruthSegment> schedule, int t) {
  for (const auto& segment : schedule)
    if (segment.first_block <= t && t <= segment.last_block)
      return segment.power;
  throw std::invalid_argument("run_online: truth schedule has a gap at block " +
                              std::to_string(t));
}

Eigen::VectorXd draw_measurements(const Scenario& sc,
                                  const Eigen::VectorXd& truth,
                                  std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd y = sc.gain * truth;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    y(i) += sc.noise_std * rng.normal();
  return y;
}

RecoveryResult estimate_power(const Scenario& sc, const Eigen::VectorXd& y,
                              const std::vector<int>& active,
                              const LassoConfig& lasso) {
  LassoConfig cfg = lasso;
  if (cfg.lambda <= 0.0)
    cfg.lambda = default_lasso_lambda(sc.gain, y, active, cfg.lambda_scale);
  if (cfg.lambda <= 0.0) cfg.lambda = 1e-12;  // all-zero data
  return irls_lasso(sc.gain, y, active, cfg);
}

}  // namespace

std::vector<TimeBlockRecord> run_online(const Scenario& sc,
                                        std::span<const TruthSegment> schedule,
                                        const OnlineConfig& cfg) {
  const int m_count = sc.sensor_count();
  if (cfg.blocks < 1)
    throw std::invalid_argument("run_online: blocks must be >= 1");
  if (cfg.active_count < 1 || cfg.active_count > m_count)
    throw std::invalid_argument("run_online: active_count must be in [1, M]");
  if (cfg.low_rate_denominator < 1)
    throw std::invalid_argument("run_online: low_rate_denominator must be >= 1");
  for (int t = 0; t < cfg.blocks; ++t) truth_at(schedule, t);  // gap check

  std::vector<TimeBlockRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.blocks));

  // Block 0: full sweep, measurement-independent selection.
  const Eigen::VectorXd y0 = draw_measurements(
      sc, truth_at(schedule, 0), derive_seed(cfg.seed, 0, 0, "measure"));
  SelectionResult active = greedy_eoptimal(
      sc.gain, cfg.active_count, std::nullopt, derive_seed(cfg.seed, 0, 0, "select"));
  Eigen::VectorXd estimate =
      estimate_power(sc, y0, active.selected, cfg.lasso).estimate;
  ReliabilityState state = ReliabilityState::fresh(y0, cfg.forgetting);

  records.push_back({0, active.selected, estimate, state.r,
                     low_rate_schedule(m_count, cfg.low_rate_denominator, 0)});

  for (int t = 1; t < cfg.blocks; ++t) {
    const Eigen::VectorXd y = draw_measurements(
        sc, truth_at(schedule, t), derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(t), "measure"));

    // Observe the round-robin class plus the current active set.
    std::vector<int> observed =
        low_rate_schedule(m_count, cfg.low_rate_denominator, t);
    observed.insert(observed.end(), active.selected.begin(), active.selected.end());
    for (const int m : observed) {
      state.t_last[static_cast<std::size_t>(m)] = t;
      state.y_last(m) = y(m);
    }

    state = update_reliability(state, t, sc.gain, estimate);
    active = reliable_greedy_select(
        sc.gain, state.u, cfg.active_count, cfg.gamma,
        derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(t), "select"));
    estimate = estimate_power(sc, y, active.selected, cfg.lasso).estimate;

    records.push_back({t, active.selected, estimate, state.r,
                       low_rate_schedule(m_count, cfg.low_rate_denominator, t)});
  }
  return records;
}

}  // namespace specsense
