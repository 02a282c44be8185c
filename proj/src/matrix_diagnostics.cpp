#include "specsense/matrix_diagnostics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "specsense/combinatorics.hpp"
#include "specsense/errors.hpp"

namespace specsense {

namespace {

void check_row_indices(const Eigen::MatrixXd& A, std::span<const int> rows) {
  for (const int r : rows)
    if (r < 0 || r >= A.rows())
      throw std::invalid_argument("row index " + std::to_string(r) +
                                  " out of range");
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& A, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = A.row(rows[i]);
  return out;
}

Eigen::MatrixXd select_cols(const Eigen::MatrixXd& A, std::span<const int> cols) {
  Eigen::MatrixXd out(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = A.col(cols[i]);
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

double row_gram_min_eig(const Eigen::MatrixXd& A, std::span<const int> rows) {
  if (rows.empty())
    throw std::invalid_argument("row_gram_min_eig: empty row set");
  check_row_indices(A, rows);
  const Eigen::MatrixXd sub = select_rows(A, rows);
  const Eigen::MatrixXd gram =
      static_cast<Eigen::Index>(rows.size()) <= A.cols()
          ? Eigen::MatrixXd(sub * sub.transpose())
          : Eigen::MatrixXd(sub.transpose() * sub);
  return std::max(0.0, min_eigenvalue(gram));
}

double projection_residual(const Eigen::MatrixXd& A, std::span<const int> rows) {
  check_row_indices(A, rows);
  const double total = A.squaredNorm();
  if (rows.empty()) return total;

  // Orthonormal basis of the selected rows' span via rank-revealing QR.
  const Eigen::MatrixXd basis_cols = select_rows(A, rows).transpose();  // N x k
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(kRankTolerance);
  qr.compute(basis_cols);
  const Eigen::Index rank = qr.rank();
  if (rank == 0) return total;
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(A.cols(), rank);
  const double captured = (A * q).squaredNorm();
  return std::max(0.0, total - captured);
}

RipReport rip_constants(const Eigen::MatrixXd& phi, int order) {
  const int n = static_cast<int>(phi.cols());
  if (order < 1 || order > n)
    throw std::invalid_argument("rip_constants: order must be in [1, cols]");
  require_enumerable(n, order, "rip_constants");

  RipReport report;
  report.order = order;
  double min_lambda_min = std::numeric_limits<double>::infinity();
  double max_lambda_max = -std::numeric_limits<double>::infinity();
  for_each_subset(n, order, [&](std::span<const int> cols) {
    const Eigen::MatrixXd sub = select_cols(phi, cols);
    const Eigen::MatrixXd gram = sub.transpose() * sub;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                      Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(order - 1);
    if (lo < min_lambda_min) {
      min_lambda_min = lo;
      report.argmin_subset.assign(cols.begin(), cols.end());
    }
    max_lambda_max = std::max(max_lambda_max, hi);
  });
  report.delta_lower = std::clamp(1.0 - min_lambda_min, 0.0, 1.0);
  report.delta_upper = std::max(0.0, max_lambda_max - 1.0);
  return report;
}

int spark(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.cols());
  if (n == 0) throw std::invalid_argument("spark: empty matrix");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(kRankTolerance);
  qr.compute(A);
  const int rank = static_cast<int>(qr.rank());

  // Worst case enumerates every subset of size <= min(N, rank+1).
  std::uint64_t worst_case = 0;
  const int k_max = std::min(n, rank + 1);
  for (int k = 1; k <= k_max; ++k) {
    worst_case += binomial_capped(n, k);
    if (worst_case > kSubsetEnumerationCap)
      throw CapacityError("spark: enumeration exceeds the cap of " +
                          std::to_string(kSubsetEnumerationCap) + " subsets");
  }

  for (int k = 1; k <= k_max; ++k) {
    int found = 0;
    for_each_subset(n, k, [&](std::span<const int> cols) {
      if (found) return;
      const Eigen::MatrixXd sub = select_cols(A, cols);
      if (sub.rows() < k) {
        found = k;  // more columns than rows: necessarily dependent
        return;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
      const auto& s = svd.singularValues();
      if (s(0) == 0.0 || s(s.size() - 1) <= kRankTolerance * s(0)) found = k;
    });
    if (found) return found;
  }
  return n + 1;  // full column rank: no dependent subset
}

double mean_min_eig(const Eigen::MatrixXd& A, int subset_columns) {
  const int n = static_cast<int>(A.cols());
  if (subset_columns < 1 || subset_columns > n)
    throw std::invalid_argument("mean_min_eig: subset size must be in [1, cols]");
  require_enumerable(n, subset_columns, "mean_min_eig");

  double sum = 0.0;
  std::uint64_t count = 0;
  for_each_subset(n, subset_columns, [&](std::span<const int> cols) {
    const Eigen::MatrixXd sub = select_cols(A, cols);
    sum += std::max(0.0, min_eigenvalue(sub.transpose() * sub));
    ++count;
  });
  return sum / static_cast<double>(count);
}

double best_rank_k_error(const Eigen::MatrixXd& A, int rank) {
  const int max_rank = static_cast<int>(std::min(A.rows(), A.cols()));
  if (rank < 0 || rank > max_rank)
    throw std::invalid_argument("best_rank_k_error: rank must be in [0, min(M,N)]");
  if (rank == 0) return A.squaredNorm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  double err = 0.0;
  for (Eigen::Index i = rank; i < s.size(); ++i) err += s(i) * s(i);
  return err;
}

SubsetSpectrum subset_spectrum(const Eigen::MatrixXd& A, std::span<const int> rows) {
  SubsetSpectrum out;
  out.subset.assign(rows.begin(), rows.end());
  out.min_eig = row_gram_min_eig(A, rows);
  const Eigen::MatrixXd sub = select_rows(A, rows);
  out.volume = std::max(0.0, Eigen::MatrixXd(sub * sub.transpose()).determinant());
  return out;
}

}  // namespace specsense
