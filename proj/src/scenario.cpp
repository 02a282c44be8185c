#include "specsense/scenario.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "specsense/rng.hpp"

namespace specsense {

Point GridSpec::point(int index) const {
  const double cell = area_extent / side_count;
  const int row = index / side_count;
  const int col = index % side_count;
  return {(col + 0.5) * cell, (row + 0.5) * cell};
}

double gain_between(Point p, Point q, double d_floor) {
  const double d = std::hypot(p.x - q.x, p.y - q.y);
  const double clamped = std::max(d, d_floor);
  return 1.0 / (clamped * clamped);
}

Scenario build_scenario(const GridSpec& grid, int sensor_count, int sparsity,
                        double snr_db, std::uint64_t seed) {
  if (grid.side_count < 1 || grid.area_extent <= 0.0)
    throw std::invalid_argument("build_scenario: invalid grid");
  if (sensor_count < 1)
    throw std::invalid_argument("build_scenario: sensor_count must be >= 1");
  const int n = grid.point_count();
  if (sparsity < 0 || sparsity > n)
    throw std::invalid_argument("build_scenario: sparsity must be in [0, N]");

  Rng rng(seed);
  Scenario sc;
  sc.grid = grid;
  sc.sparsity = sparsity;
  sc.seed = seed;

  sc.sensor_positions.reserve(static_cast<std::size_t>(sensor_count));
  for (int m = 0; m < sensor_count; ++m) {
    const double x = rng.uniform(0.0, grid.area_extent);
    const double y = rng.uniform(0.0, grid.area_extent);
    sc.sensor_positions.push_back({x, y});
  }

  const double floor = distance_floor(grid.area_extent);
  sc.gain.resize(sensor_count, n);
  for (int m = 0; m < sensor_count; ++m)
    for (int s = 0; s < n; ++s)
      sc.gain(m, s) = gain_between(sc.sensor_positions[static_cast<std::size_t>(m)],
                                   grid.point(s), floor);

  // Active transmitters drawn without replacement, each at unit power.
  sc.true_power = Eigen::VectorXd::Zero(n);
  std::vector<int> slots(static_cast<std::size_t>(n));
  std::iota(slots.begin(), slots.end(), 0);
  for (int i = 0; i < sparsity; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
    sc.true_power(slots[static_cast<std::size_t>(i)]) = 1.0;
  }

  if (sparsity == 0) {
    sc.noise_std = 0.0;  // zero-signal convention: SNR is undefined
  } else {
    const Eigen::VectorXd clean = sc.gain * sc.true_power;
    const double mean_signal_power = clean.squaredNorm() / sensor_count;
    sc.noise_std = std::sqrt(mean_signal_power / std::pow(10.0, snr_db / 10.0));
  }
  return sc;
}

MeasurementSet sample_measurements(const Scenario& sc, std::uint64_t seed) {
  Rng rng(seed);
  const int m = sc.sensor_count();
  MeasurementSet out;
  out.per_sensor_noise.resize(m);
  for (int i = 0; i < m; ++i)
    out.per_sensor_noise(i) = sc.noise_std * rng.normal();
  out.values = sc.gain * sc.true_power + out.per_sensor_noise;
  return out;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["grid"] = {{"side_count", sc.grid.side_count},
               {"area_extent", sc.grid.area_extent}};
  auto& pos = j["sensor_positions"] = nlohmann::json::array();
  for (const auto& p : sc.sensor_positions) pos.push_back({p.x, p.y});
  auto& gain = j["gain"] = nlohmann::json::array();
  for (int r = 0; r < sc.gain.rows(); ++r)
    for (int c = 0; c < sc.gain.cols(); ++c) gain.push_back(sc.gain(r, c));
  j["true_power"] = std::vector<double>(
      sc.true_power.data(), sc.true_power.data() + sc.true_power.size());
  j["sparsity"] = sc.sparsity;
  j["noise_std"] = sc.noise_std;
  j["seed"] = sc.seed;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  sc.grid.side_count = j.at("grid").at("side_count").get<int>();
  sc.grid.area_extent = j.at("grid").at("area_extent").get<double>();
  for (const auto& p : j.at("sensor_positions"))
    sc.sensor_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  const auto m = static_cast<Eigen::Index>(sc.sensor_positions.size());
  const auto true_power = j.at("true_power").get<std::vector<double>>();
  const auto n = static_cast<Eigen::Index>(true_power.size());
  const auto& gain = j.at("gain");
  if (static_cast<Eigen::Index>(gain.size()) != m * n)
    throw std::invalid_argument("scenario_from_json: gain size mismatch");
  sc.gain.resize(m, n);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      sc.gain(r, c) = gain.at(static_cast<std::size_t>(k++)).get<double>();
  sc.true_power = Eigen::Map<const Eigen::VectorXd>(true_power.data(), n);
  sc.sparsity = j.at("sparsity").get<int>();
  sc.noise_std = j.at("noise_std").get<double>();
  sc.seed = j.at("seed").get<std::uint64_t>();
  return sc;
}

}  // namespace specsense
