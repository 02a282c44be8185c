#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace specsense {

// Ridge added to the accumulated Gram so log-det is finite before N rows
// have been selected.
inline constexpr double kDoptimalRidge = 1e-12;

struct SelectionResult {
  std::vector<int> selected;           // K distinct sensor indices, pick order
  std::vector<double> objective_trace; // objective of each selection prefix
  std::string method;
  std::uint64_t seed = 0;
};

enum class SelectionObjective { MinEig, LogDet };

// Exact distribution over all C(M,K) row subsets, lexicographic order.
struct SubsetDistribution {
  int subset_size = 0;
  std::vector<std::vector<int>> subsets;
  std::vector<double> probabilities;
};

// Both sides of the E-optimal sampling bound. The theorem's constant is not
// computable from first principles, so this is reporting-only: consumers see
// the expectation and the bound with the constant left out.
struct EoptBoundDiagnostic {
  double expected_residual = 0.0;
  double bound_without_constant = 0.0;
};

// Greedy maximization of the two-regime minimum Gram eigenvalue. The first
// sensor is `init` when given, otherwise drawn uniformly from `seed`; each
// later step takes the candidate maximizing the grown subset's objective,
// ties to the lowest index.
SelectionResult greedy_eoptimal(const Eigen::MatrixXd& A, int k,
                                std::optional<int> init, std::uint64_t seed);

// Greedy maximization of log det(sum a_m a_m^T + ridge I); same
// initialization and tie rules as greedy_eoptimal.
SelectionResult greedy_doptimal(const Eigen::MatrixXd& A, int k,
                                std::optional<int> init, std::uint64_t seed);

// Uniform K-subset without replacement (selection sampling, so the result is
// sorted and K = M yields 0..M-1).
SelectionResult random_selection(int sensor_count, int k, std::uint64_t seed);

// Exact argmax over all K-subsets; ties to the lexicographically smallest.
SelectionResult oracle_best_subset(const Eigen::MatrixXd& A, int k,
                                   SelectionObjective objective);

// Pr(T) proportional to det(A_T A_T^T).
SubsetDistribution volume_distribution(const Eigen::MatrixXd& A, int k);

// Pr(T) proportional to sigma_min^2(A_T).
SubsetDistribution eoptimal_distribution(const Eigen::MatrixXd& A, int k);

// Sum over subsets of Pr(T) * projection_residual(A, T).
double expected_projection_error(const Eigen::MatrixXd& A,
                                 const SubsetDistribution& dist);

// Inverse-CDF draw over the lexicographically ordered subset list.
std::vector<int> sample_subset(const SubsetDistribution& dist,
                               std::uint64_t seed);

SelectionResult volume_sample_selection(const Eigen::MatrixXd& A, int k,
                                        std::uint64_t seed);
SelectionResult eopt_sample_selection(const Eigen::MatrixXd& A, int k,
                                      std::uint64_t seed);

// log det of the accumulated Gram of the selected rows plus ridge I.
double accumulated_log_det(const Eigen::MatrixXd& A, std::span<const int> rows,
                           double ridge = kDoptimalRidge);

EoptBoundDiagnostic eoptimal_bound_diagnostic(const Eigen::MatrixXd& A, int k);

namespace detail {

// Shared greedy engine: score(m) = min_eig(S + m) + gamma * u_m^2.
// `scored_first_pick` decides what happens when no init is given: true picks
// the best-scoring sensor, false draws one uniformly from the seed.
SelectionResult greedy_min_eig_core(const Eigen::MatrixXd& A, int k,
                                    std::optional<int> init, std::uint64_t seed,
                                    double gamma,
                                    const Eigen::VectorXd* unreliability,
                                    bool scored_first_pick,
                                    std::string method);

}  // namespace detail

}  // namespace specsense
