#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace specsense {

struct LassoConfig {
  double lambda = 0.01;        // l1 weight
  int max_iterations = 100;
  double epsilon_floor = 1e-8; // final reweighting smoother
  double tolerance = 1e-8;     // relative estimate-change stop
  // Used by harnesses that resolve lambda from the data (lambda <= 0 there):
  // lambda = lambda_scale * ||A_S^T y_S||_inf.
  double lambda_scale = 0.01;
};

struct RecoveryResult {
  Eigen::VectorXd estimate;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  std::vector<int> support;             // |x_i| > tau * max|x|, tau = 0.05
  std::vector<double> objective_trace;  // objective after each accepted step
};

// Minimizes ||y_S - A_S x||_2^2 + lambda ||x||_1 by iteratively reweighted
// ridge: each step solves (A_S^T A_S + (lambda/2) diag(1/(|x_i|+eps))) x =
// A_S^T y_S. eps anneals from 1e-2 toward epsilon_floor by factor 10 whenever
// the iterate stagnates; steps that would raise the objective are rejected
// and treated as stagnation, so the recorded objective never increases.
RecoveryResult irls_lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                          std::span<const int> selection,
                          const LassoConfig& cfg);

// Data-scaled default: scale * ||A_S^T y_S||_inf.
double default_lasso_lambda(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                            std::span<const int> selection, double scale = 0.01);

// Least-squares solution (A^T A)^-1 A^T y; requires full column rank.
Eigen::VectorXd ml_estimate(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

// Estimation-error covariance sigma^2 (A^T A)^-1 for the ML estimator.
Eigen::MatrixXd ml_covariance(const Eigen::MatrixXd& A, double noise_variance);

}  // namespace specsense
