#include "specsense/recovery.hpp"

#include <cmath>
#include <stdexcept>

#include "specsense/errors.hpp"
#include "specsense/metrics.hpp"

namespace specsense {

namespace {

constexpr double kEpsilonStart = 1e-2;

struct RestrictedSystem {
  Eigen::MatrixXd A;  // selected rows
  Eigen::VectorXd y;
};

RestrictedSystem restrict_rows(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& y,
                               std::span<const int> selection) {
  if (selection.empty())
    throw std::invalid_argument("irls_lasso: selection must be nonempty");
  if (y.size() != A.rows())
    throw std::invalid_argument("irls_lasso: y length must match row count");
  RestrictedSystem sys;
  sys.A.resize(static_cast<Eigen::Index>(selection.size()), A.cols());
  sys.y.resize(static_cast<Eigen::Index>(selection.size()));
  for (std::size_t i = 0; i < selection.size(); ++i) {
    const int r = selection[i];
    if (r < 0 || r >= A.rows())
      throw std::invalid_argument("irls_lasso: selection index out of range");
    sys.A.row(static_cast<Eigen::Index>(i)) = A.row(r);
    sys.y(static_cast<Eigen::Index>(i)) = y(r);
  }
  if (!sys.A.allFinite() || !sys.y.allFinite())
    throw std::invalid_argument("irls_lasso: inputs must be finite");
  return sys;
}

}  // namespace

RecoveryResult irls_lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                          std::span<const int> selection,
                          const LassoConfig& cfg) {
  if (cfg.lambda <= 0.0 || cfg.max_iterations < 1 || cfg.epsilon_floor <= 0.0 ||
      cfg.tolerance <= 0.0)
    throw std::invalid_argument("irls_lasso: config fields must be positive");

  const auto [a_sel, y_sel] = restrict_rows(A, y, selection);
  const auto n = A.cols();
  const Eigen::MatrixXd normal = a_sel.transpose() * a_sel;
  const Eigen::VectorXd rhs = a_sel.transpose() * y_sel;

  const auto objective_at = [&](const Eigen::VectorXd& x) {
    return (y_sel - a_sel * x).squaredNorm() + cfg.lambda * x.lpNorm<1>();
  };

  RecoveryResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  double objective = objective_at(x);
  double eps = std::max(kEpsilonStart, cfg.epsilon_floor);
  // A looser per-stage threshold drives annealing; the strict one only stops
  // the final stage. Waiting for full convergence at every eps would let one
  // slow coordinate starve the whole schedule.
  const double stage_tol = std::max(cfg.tolerance, 1e-3);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    ++result.iterations;
    Eigen::MatrixXd system = normal;
    for (Eigen::Index i = 0; i < n; ++i)
      system(i, i) += 0.5 * cfg.lambda / (std::abs(x(i)) + eps);
    const Eigen::VectorXd x_next = system.ldlt().solve(rhs);
    const double objective_next = objective_at(x_next);

    bool stagnated;
    double rel_change = std::numeric_limits<double>::infinity();
    if (objective_next <= objective) {
      rel_change = (x_next - x).norm() / std::max(x_next.norm(), 1e-30);
      x = x_next;
      objective = objective_next;
      result.objective_trace.push_back(objective);
      stagnated = rel_change < stage_tol;
    } else {
      stagnated = true;  // reject uphill step, tighten the smoother instead
    }

    if (eps > cfg.epsilon_floor) {
      if (stagnated) eps = std::max(eps / 10.0, cfg.epsilon_floor);
    } else if (stagnated && rel_change < cfg.tolerance) {
      result.converged = true;
      break;
    } else if (!std::isfinite(rel_change)) {
      result.converged = true;  // rejected step at the floor: stationary
      break;
    }
  }

  result.estimate = x;
  result.final_objective = objective;
  result.support = support_of(x, 0.05);
  return result;
}

double default_lasso_lambda(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                            std::span<const int> selection, double scale) {
  const auto [a_sel, y_sel] = restrict_rows(A, y, selection);
  return scale * (a_sel.transpose() * y_sel).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd ml_estimate(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  if (y.size() != A.rows())
    throw std::invalid_argument("ml_estimate: y length must match row count");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(1e-10);
  qr.compute(A);
  if (qr.rank() < A.cols())
    throw RankDeficiencyError("ml_estimate: A^T A is singular");
  return qr.solve(y);
}

Eigen::MatrixXd ml_covariance(const Eigen::MatrixXd& A, double noise_variance) {
  const Eigen::MatrixXd normal = A.transpose() * A;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible())
    throw RankDeficiencyError("ml_covariance: A^T A is singular");
  return noise_variance * lu.inverse();
}

}  // namespace specsense
