#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace specsense {

// Singular values below kRankTolerance * sigma_max count as zero.
inline constexpr double kRankTolerance = 1e-10;

// Exact asymmetric restricted-isometry constants of order `order`,
// obtained by enumerating every column subset of that size.
struct RipReport {
  int order = 0;
  double delta_lower = 0.0;  // 1 - min over subsets of lambda_min, in [0,1]
  double delta_upper = 0.0;  // max over subsets of lambda_max - 1, >= 0
  std::vector<int> argmin_subset;  // columns achieving delta_lower
};

struct SubsetSpectrum {
  std::vector<int> subset;
  double min_eig = 0.0;  // two-regime minimum eigenvalue, see row_gram_min_eig
  double volume = 0.0;   // det(A_T A_T^T)
};

// Minimum eigenvalue of the Gram of the selected rows. Two regimes:
//   |T| <= N: lambda_min(A_T A_T^T), the |T|x|T| row Gram (= sigma_min^2(A_T))
//   |T| >  N: lambda_min(sum_{m in T} a_m a_m^T), the NxN accumulated Gram
// The first keeps the value informative below N rows, the second matches the
// selection-matrix objective once the system is overdetermined.
double row_gram_min_eig(const Eigen::MatrixXd& A, std::span<const int> rows);

// ||A - pi_T(A)||_F^2 where pi_T projects every row of A onto the span of
// the rows indexed by T. Empty T yields ||A||_F^2.
double projection_residual(const Eigen::MatrixXd& A, std::span<const int> rows);

RipReport rip_constants(const Eigen::MatrixXd& phi, int order);

// Smallest number of linearly dependent columns; N+1 if the matrix has full
// column rank (no dependent subset exists).
int spark(const Eigen::MatrixXd& A);

// Mean of sigma_min^2(A_S) over all column subsets S of the given size.
// The order-K mean lower RIP constant is 1 minus this value.
double mean_min_eig(const Eigen::MatrixXd& A, int subset_columns);

// ||A - A_K||_F^2: the squared singular values beyond the K-th.
double best_rank_k_error(const Eigen::MatrixXd& A, int rank);

SubsetSpectrum subset_spectrum(const Eigen::MatrixXd& A, std::span<const int> rows);

}  // namespace specsense
