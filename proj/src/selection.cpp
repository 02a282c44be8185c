#include "specsense/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specsense/combinatorics.hpp"
#include "specsense/errors.hpp"
#include "specsense/matrix_diagnostics.hpp"
#include "specsense/rng.hpp"

namespace specsense {

namespace {

double min_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void check_selection_args(Eigen::Index m, int k, std::optional<int> init) {
  if (k < 1 || k > m)
    throw std::invalid_argument("selection size must be in [1, sensor count]");
  if (init && (*init < 0 || *init >= m))
    throw std::invalid_argument("init sensor index out of range");
}

// Incrementally grown Grams for the greedy sweep: the bordered row Gram
// serves the |T| <= N regime, the accumulated NxN Gram the |T| > N regime.
struct GreedyScratch {
  const Eigen::MatrixXd& A;
  std::vector<int> selected;
  Eigen::MatrixXd row_gram;  // k x k
  Eigen::MatrixXd acc_gram;  // N x N
  Eigen::MatrixXd cross;     // M x k, cross(m, j) = a_m . a_{selected[j]}
  Eigen::VectorXd sq_norms;  // M

  explicit GreedyScratch(const Eigen::MatrixXd& a)
      : A(a),
        acc_gram(Eigen::MatrixXd::Zero(a.cols(), a.cols())),
        cross(a.rows(), 0),
        sq_norms(a.rowwise().squaredNorm()) {}

  double candidate_min_eig(int m) const {
    const auto k = static_cast<Eigen::Index>(selected.size());
    if (k + 1 <= A.cols()) {
      Eigen::MatrixXd g(k + 1, k + 1);
      g.topLeftCorner(k, k) = row_gram;
      for (Eigen::Index j = 0; j < k; ++j) g(k, j) = g(j, k) = cross(m, j);
      g(k, k) = sq_norms(m);
      return std::max(0.0, min_eigenvalue(g));
    }
    const Eigen::MatrixXd g =
        acc_gram + A.row(m).transpose() * A.row(m);
    return std::max(0.0, min_eigenvalue(g));
  }

  void push(int s) {
    const auto k = static_cast<Eigen::Index>(selected.size());
    Eigen::MatrixXd g(k + 1, k + 1);
    g.topLeftCorner(k, k) = row_gram;
    for (Eigen::Index j = 0; j < k; ++j) g(k, j) = g(j, k) = cross(s, j);
    g(k, k) = sq_norms(s);
    row_gram.swap(g);
    acc_gram += A.row(s).transpose() * A.row(s);
    cross.conservativeResize(Eigen::NoChange, k + 1);
    cross.col(k) = A * A.row(s).transpose();
    selected.push_back(s);
  }
};

}  // namespace

namespace detail {

SelectionResult greedy_min_eig_core(const Eigen::MatrixXd& A, int k,
                                    std::optional<int> init, std::uint64_t seed,
                                    double gamma,
                                    const Eigen::VectorXd* unreliability,
                                    bool scored_first_pick,
                                    std::string method) {
  const auto m_count = A.rows();
  check_selection_args(m_count, k, init);
  if (unreliability) {
    if (unreliability->size() != m_count)
      throw std::invalid_argument("unreliability vector length mismatch");
    if ((unreliability->array() <= 0.0).any())
      throw std::invalid_argument("unreliability must be positive");
  }

  const auto reg_term = [&](int m) {
    return unreliability ? gamma * (*unreliability)(m) * (*unreliability)(m)
                         : 0.0;
  };

  SelectionResult result;
  result.method = std::move(method);
  result.seed = seed;

  GreedyScratch scratch(A);
  std::vector<char> taken(static_cast<std::size_t>(m_count), 0);
  double reg_sum = 0.0;  // gamma * ||u_S||^2 of the current selection

  const auto take = [&](int s) {
    scratch.push(s);
    taken[static_cast<std::size_t>(s)] = 1;
    reg_sum += reg_term(s);
    result.selected.push_back(s);
    result.objective_trace.push_back(
        row_gram_min_eig(A, scratch.selected) + reg_sum);
  };

  int first;
  if (init) {
    first = *init;
  } else if (scored_first_pick) {
    first = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < m_count; ++m) {
      const double score = scratch.sq_norms(m) + reg_term(m);
      if (score > best) {
        best = score;
        first = m;
      }
    }
  } else {
    first = static_cast<int>(
        Rng(seed).below(static_cast<std::uint64_t>(m_count)));
  }
  take(first);

  while (static_cast<int>(result.selected.size()) < k) {
    int best_m = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < m_count; ++m) {
      if (taken[static_cast<std::size_t>(m)]) continue;
      const double score = scratch.candidate_min_eig(m) + reg_term(m);
      if (score > best) {
        best = score;
        best_m = m;
      }
    }
    take(best_m);
  }
  return result;
}

}  // namespace detail

SelectionResult greedy_eoptimal(const Eigen::MatrixXd& A, int k,
                                std::optional<int> init, std::uint64_t seed) {
  return detail::greedy_min_eig_core(A, k, init, seed, 0.0, nullptr,
                                     /*scored_first_pick=*/false,
                                     "e-optimal-greedy");
}

SelectionResult greedy_doptimal(const Eigen::MatrixXd& A, int k,
                                std::optional<int> init, std::uint64_t seed) {
  const auto m_count = A.rows();
  check_selection_args(m_count, k, init);

  SelectionResult result;
  result.method = "d-optimal-greedy";
  result.seed = seed;

  const auto n = A.cols();
  Eigen::MatrixXd gram =
      kDoptimalRidge * Eigen::MatrixXd::Identity(n, n);
  std::vector<char> taken(static_cast<std::size_t>(m_count), 0);

  const auto take = [&](int s) {
    gram += A.row(s).transpose() * A.row(s);
    taken[static_cast<std::size_t>(s)] = 1;
    result.selected.push_back(s);
    result.objective_trace.push_back(accumulated_log_det(A, result.selected));
  };

  take(init ? *init
            : static_cast<int>(
                  Rng(seed).below(static_cast<std::uint64_t>(m_count))));

  while (static_cast<int>(result.selected.size()) < k) {
    // Determinant lemma: log det(G + aa^T) = log det G + log(1 + a^T G^-1 a),
    // so candidates are ranked by the quadratic form alone.
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    int best_m = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < m_count; ++m) {
      if (taken[static_cast<std::size_t>(m)]) continue;
      const Eigen::VectorXd a = A.row(m).transpose();
      const double q = a.dot(llt.solve(a));
      if (q > best) {
        best = q;
        best_m = m;
      }
    }
    take(best_m);
  }
  return result;
}

SelectionResult random_selection(int sensor_count, int k, std::uint64_t seed) {
  if (sensor_count < 1)
    throw std::invalid_argument("random_selection: sensor_count must be >= 1");
  check_selection_args(sensor_count, k, std::nullopt);

  SelectionResult result;
  result.method = "random";
  result.seed = seed;

  // Selection sampling: uniform over subsets, emitted in increasing order.
  Rng rng(seed);
  int remaining = k;
  for (int m = 0; m < sensor_count && remaining > 0; ++m) {
    if (rng.below(static_cast<std::uint64_t>(sensor_count - m)) <
        static_cast<std::uint64_t>(remaining)) {
      result.selected.push_back(m);
      --remaining;
    }
  }
  return result;
}

namespace {

std::vector<double> prefix_trace(const Eigen::MatrixXd& A,
                                 const std::vector<int>& subset,
                                 SelectionObjective objective) {
  std::vector<double> trace;
  std::vector<int> prefix;
  for (const int s : subset) {
    prefix.push_back(s);
    trace.push_back(objective == SelectionObjective::MinEig
                        ? row_gram_min_eig(A, prefix)
                        : accumulated_log_det(A, prefix));
  }
  return trace;
}

}  // namespace

SelectionResult oracle_best_subset(const Eigen::MatrixXd& A, int k,
                                   SelectionObjective objective) {
  const int m_count = static_cast<int>(A.rows());
  check_selection_args(m_count, k, std::nullopt);
  require_enumerable(m_count, k, "oracle_best_subset");

  SelectionResult result;
  result.method = "oracle";

  double best = -std::numeric_limits<double>::infinity();
  for_each_subset(m_count, k, [&](std::span<const int> subset) {
    const double value = objective == SelectionObjective::MinEig
                             ? row_gram_min_eig(A, subset)
                             : accumulated_log_det(A, subset);
    if (value > best) {  // lexicographic enumeration keeps first maximizer
      best = value;
      result.selected.assign(subset.begin(), subset.end());
    }
  });
  result.objective_trace = prefix_trace(A, result.selected, objective);
  return result;
}

namespace {

SubsetDistribution weighted_distribution(const Eigen::MatrixXd& A, int k,
                                         const char* what,
                                         double (*weight)(const Eigen::MatrixXd&,
                                                          std::span<const int>)) {
  const int m_count = static_cast<int>(A.rows());
  if (k < 1 || k > m_count)
    throw std::invalid_argument(std::string(what) + ": invalid subset size");
  require_enumerable(m_count, k, what);

  SubsetDistribution dist;
  dist.subset_size = k;
  double total = 0.0;
  for_each_subset(m_count, k, [&](std::span<const int> subset) {
    dist.subsets.emplace_back(subset.begin(), subset.end());
    const double w = weight(A, subset);
    dist.probabilities.push_back(w);
    total += w;
  });
  if (total <= 0.0)
    throw DegenerateDistributionError(std::string(what) +
                                      ": every subset has zero weight");
  for (double& p : dist.probabilities) p /= total;
  return dist;
}

double volume_weight(const Eigen::MatrixXd& A, std::span<const int> rows) {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), A.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    sub.row(static_cast<Eigen::Index>(i)) = A.row(rows[i]);
  return std::max(0.0, Eigen::MatrixXd(sub * sub.transpose()).determinant());
}

double min_eig_weight(const Eigen::MatrixXd& A, std::span<const int> rows) {
  return row_gram_min_eig(A, rows);
}

}  // namespace

SubsetDistribution volume_distribution(const Eigen::MatrixXd& A, int k) {
  return weighted_distribution(A, k, "volume_distribution", volume_weight);
}

SubsetDistribution eoptimal_distribution(const Eigen::MatrixXd& A, int k) {
  return weighted_distribution(A, k, "eoptimal_distribution", min_eig_weight);
}

double expected_projection_error(const Eigen::MatrixXd& A,
                                 const SubsetDistribution& dist) {
  if (dist.subsets.size() !=
      binomial_capped(static_cast<int>(A.rows()), dist.subset_size))
    throw std::invalid_argument(
        "expected_projection_error: distribution does not cover all subsets");
  double expectation = 0.0;
  for (std::size_t i = 0; i < dist.subsets.size(); ++i) {
    const double p = dist.probabilities[i];
    if (p > 0.0) expectation += p * projection_residual(A, dist.subsets[i]);
  }
  return expectation;
}

std::vector<int> sample_subset(const SubsetDistribution& dist,
                               std::uint64_t seed) {
  if (dist.subsets.empty())
    throw std::invalid_argument("sample_subset: empty distribution");
  const double u = Rng(seed).uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < dist.subsets.size(); ++i) {
    cum += dist.probabilities[i];
    if (u < cum) return dist.subsets[i];
  }
  return dist.subsets.back();
}

namespace {

SelectionResult sampled_selection(const Eigen::MatrixXd& A,
                                  const SubsetDistribution& dist,
                                  std::string method, std::uint64_t seed) {
  SelectionResult result;
  result.method = std::move(method);
  result.seed = seed;
  result.selected = sample_subset(dist, seed);
  result.objective_trace =
      prefix_trace(A, result.selected, SelectionObjective::MinEig);
  return result;
}

}  // namespace

SelectionResult volume_sample_selection(const Eigen::MatrixXd& A, int k,
                                        std::uint64_t seed) {
  return sampled_selection(A, volume_distribution(A, k), "volume-sample", seed);
}

SelectionResult eopt_sample_selection(const Eigen::MatrixXd& A, int k,
                                      std::uint64_t seed) {
  return sampled_selection(A, eoptimal_distribution(A, k), "eopt-sample", seed);
}

double accumulated_log_det(const Eigen::MatrixXd& A, std::span<const int> rows,
                           double ridge) {
  const auto n = A.cols();
  Eigen::MatrixXd gram = ridge * Eigen::MatrixXd::Identity(n, n);
  for (const int r : rows) {
    if (r < 0 || r >= A.rows())
      throw std::invalid_argument("accumulated_log_det: row index out of range");
    gram += A.row(r).transpose() * A.row(r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    log_det += std::log(std::max(es.eigenvalues()(i), 1e-300));
  return log_det;
}

EoptBoundDiagnostic eoptimal_bound_diagnostic(const Eigen::MatrixXd& A, int k) {
  const int m_count = static_cast<int>(A.rows());
  if (k < 1 || k >= m_count)
    throw std::invalid_argument(
        "eoptimal_bound_diagnostic: need 1 <= K < row count");

  EoptBoundDiagnostic diag;
  diag.expected_residual =
      expected_projection_error(A, eoptimal_distribution(A, k));

  // Mean minimum eigenvalues over row subsets, i.e. column subsets of A^T.
  const Eigen::MatrixXd at = A.transpose();
  const double mean_k = mean_min_eig(at, k);
  const double mean_k1 = mean_min_eig(at, k + 1);
  diag.bound_without_constant =
      mean_k > 0.0 ? static_cast<double>(m_count - k) / (k + 1) * mean_k1 / mean_k
                   : std::numeric_limits<double>::infinity();
  return diag;
}

}  // namespace specsense
