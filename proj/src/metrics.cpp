#include "specsense/metrics.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "specsense/scenario.hpp"

namespace specsense {

std::vector<int> support_of(const Eigen::VectorXd& x, double tau) {
  if (tau <= 0.0 || tau >= 1.0)
    throw std::invalid_argument("support_of: tau must be in (0,1)");
  const double peak = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  std::vector<int> support;
  if (peak == 0.0) return support;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > tau * peak) support.push_back(static_cast<int>(i));
  return support;
}

bool recovery_success(const Eigen::VectorXd& x_hat,
                      const Eigen::VectorXd& x_true, double tau) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("recovery_success: length mismatch");
  std::vector<int> exact;
  for (Eigen::Index i = 0; i < x_true.size(); ++i)
    if (x_true(i) != 0.0) exact.push_back(static_cast<int>(i));
  return support_of(x_hat, tau) == exact;
}

double normalized_error(const Eigen::VectorXd& x_hat,
                        const Eigen::VectorXd& x_true) {
  if (x_hat.size() != x_true.size())
    throw std::invalid_argument("normalized_error: length mismatch");
  const double denom = x_true.norm();
  if (denom == 0.0)
    throw std::invalid_argument("normalized_error: x_true must be nonzero");
  return (x_true - x_hat).norm() / denom;
}

double spurious_power(const Eigen::VectorXd& x_hat,
                      std::span<const int> true_support) {
  std::vector<char> on_support(static_cast<std::size_t>(x_hat.size()), 0);
  for (const int i : true_support) {
    if (i < 0 || i >= x_hat.size())
      throw std::invalid_argument("spurious_power: support index out of range");
    on_support[static_cast<std::size_t>(i)] = 1;
  }
  double mass = 0.0;
  for (Eigen::Index i = 0; i < x_hat.size(); ++i)
    if (!on_support[static_cast<std::size_t>(i)]) mass += std::abs(x_hat(i));
  return mass;
}

ReliabilityMap reliability_raster(const Scenario& sc, const Eigen::VectorXd& r,
                                  int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("reliability_raster: resolution must be >= 2");
  if (r.size() != sc.sensor_count())
    throw std::invalid_argument("reliability_raster: reliability length mismatch");

  ReliabilityMap map;
  map.width = resolution;
  map.height = resolution;
  map.extent = sc.grid.area_extent;
  map.values.resize(resolution, resolution);

  const double cell = sc.grid.area_extent / resolution;
  const double floor = sc.d_floor();
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      const Point p{(col + 0.5) * cell, (row + 0.5) * cell};
      double weight_sum = 0.0;
      double value = 0.0;
      for (int m = 0; m < sc.sensor_count(); ++m) {
        const double w =
            gain_between(p, sc.sensor_positions[static_cast<std::size_t>(m)], floor);
        weight_sum += w;
        value += w * r(m);
      }
      map.values(row, col) = value / weight_sum;
    }
  }
  return map;
}

double mean_reliability(const Eigen::VectorXd& r) {
  if (r.size() == 0)
    throw std::invalid_argument("mean_reliability: empty vector");
  return r.mean();
}

void write_pgm(const ReliabilityMap& map, std::ostream& out) {
  out << "P2\n" << map.width << " " << map.height << "\n255\n";
  for (int row = 0; row < map.height; ++row) {
    for (int col = 0; col < map.width; ++col) {
      out << static_cast<int>(std::lround(255.0 * map.values(row, col)));
      out << (col + 1 == map.width ? '\n' : ' ');
    }
  }
}

std::string to_pgm_string(const ReliabilityMap& map) {
  std::ostringstream oss;
  write_pgm(map, oss);
  return oss.str();
}

nlohmann::json reliability_map_to_json(const ReliabilityMap& map) {
  nlohmann::json j;
  j["width"] = map.width;
  j["height"] = map.height;
  j["extent"] = map.extent;
  auto& rows = j["values"] = nlohmann::json::array();
  for (int row = 0; row < map.height; ++row) {
    nlohmann::json line = nlohmann::json::array();
    for (int col = 0; col < map.width; ++col) line.push_back(map.values(row, col));
    rows.push_back(std::move(line));
  }
  return j;
}

}  // namespace specsense
