#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "specsense/recovery.hpp"
#include "specsense/selection.hpp"

namespace specsense {

struct Scenario;

// Reliability never decays below this, keeping unreliability finite.
inline constexpr double kReliabilityFloor = 1e-6;

struct ReliabilityState {
  Eigen::VectorXd r;        // per-sensor reliability, in [floor, 1]
  Eigen::VectorXd u;        // unreliability, 1/r
  std::vector<int> t_last;  // last block each sensor was sampled
  Eigen::VectorXd y_last;   // measurement taken at t_last
  double forgetting = 0.1;  // per-block decay rate

  static ReliabilityState fresh(const Eigen::VectorXd& y0, double forgetting);
};

struct OnlineConfig {
  int active_count = 8;          // K, sensors sampled every block
  int low_rate_denominator = 30; // n_l, each sensor sampled once per n_l blocks
  double gamma = 0.0;            // unreliability regularization weight
  int blocks = 1;
  double forgetting = 0.1;
  // lambda <= 0 selects the data-scaled default per estimation.
  LassoConfig lasso{.lambda = 0.0};
  std::uint64_t seed = 0;
};

struct TimeBlockRecord {
  int t = 0;
  std::vector<int> active_set;
  Eigen::VectorXd estimate;
  Eigen::VectorXd reliability;
  std::vector<int> sampled_low_rate;
};

struct TruthSegment {
  int first_block = 0;
  int last_block = 0;  // inclusive
  Eigen::VectorXd power;
};

// a_m . x_prev: the model's prediction of sensor m's measurement.
double predict_measurement(const Eigen::MatrixXd& A, int sensor,
                           const Eigen::VectorXd& x_prev);

// r_m = exp(-forgetting * (t - t_m)) / (1 + (y_m - prediction)^2), clamped
// to [kReliabilityFloor, 1]; u = 1/r.
ReliabilityState update_reliability(const ReliabilityState& state, int t,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& x_prev);

// Greedy selection scored by min_eig(S + m) + gamma * u_m^2. Without an
// explicit init every pick is score-driven; with the same init and seed,
// gamma = 0 reproduces greedy_eoptimal exactly.
SelectionResult reliable_greedy_select(const Eigen::MatrixXd& A,
                                       const Eigen::VectorXd& unreliability,
                                       int k, double gamma, std::uint64_t seed,
                                       std::optional<int> init = std::nullopt);

// Round-robin: sensor m observed at block t iff m % n_l == t % n_l.
std::vector<int> low_rate_schedule(int sensor_count, int n_l, int t);

// Online sensing loop. Block 0: one full observation sweep seeds y_last,
// the active set comes from greedy_eoptimal and the estimate from
// irls_lasso on the active rows. Every later block: fresh measurements for
// the round-robin class and the previous active set, reliability update
// against the previous estimate, reliability-regularized reselection, and
// re-estimation from the new active set's measurements only.
std::vector<TimeBlockRecord> run_online(const Scenario& sc,
                                        std::span<const TruthSegment> schedule,
                                        const OnlineConfig& cfg);

}  // namespace specsense
