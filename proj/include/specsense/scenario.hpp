#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace specsense {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Square grid of candidate transmitter locations. Points sit at cell
// centers and are indexed row-major: index = row * side_count + col.
struct GridSpec {
  int side_count = 6;
  double area_extent = 10.0;

  int point_count() const { return side_count * side_count; }
  Point point(int index) const;
};

// Distance clamp for the inverse-square gain law, which is singular at d=0.
inline double distance_floor(double area_extent) { return 1e-3 * area_extent; }

// Channel gain 1 / max(||p-q||, d_floor)^2.
double gain_between(Point p, Point q, double d_floor = 0.01);

// Immutable synthetic network: grid, sensors, gains, ground truth.
struct Scenario {
  GridSpec grid;
  std::vector<Point> sensor_positions;
  Eigen::MatrixXd gain;        // M x N, row m = gains from sensor m to grid
  Eigen::VectorXd true_power;  // length N, `sparsity` entries equal to 1.0
  int sparsity = 0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  int sensor_count() const { return static_cast<int>(gain.rows()); }
  int grid_point_count() const { return static_cast<int>(gain.cols()); }
  double d_floor() const { return distance_floor(grid.area_extent); }
};

struct MeasurementSet {
  Eigen::VectorXd values;            // y = A x* + nu
  Eigen::VectorXd per_sensor_noise;  // nu
};

// Draw order from `seed`: sensor positions (x then y per sensor), then the
// active support (partial Fisher-Yates). noise_std is set so that
// 10*log10(mean((A x*)^2) / sigma^2) == snr_db; sparsity 0 forces sigma = 0.
Scenario build_scenario(const GridSpec& grid, int sensor_count, int sparsity,
                        double snr_db, std::uint64_t seed);

// nu ~ iid Gaussian(0, noise_std^2) from `seed`; y = A x* + nu.
MeasurementSet sample_measurements(const Scenario& sc, std::uint64_t seed);

nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace specsense
