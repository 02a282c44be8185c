#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace specsense {

struct Scenario;

// Inverse-distance-weighted raster of per-sensor reliabilities over the
// scenario area. Cell (row, col) sits at the center of its cell; row 0 is
// the lowest y band.
struct ReliabilityMap {
  int width = 0;
  int height = 0;
  Eigen::MatrixXd values;  // height x width
  double extent = 0.0;
};

// Indices with |x_i| > tau * max_j |x_j|; empty for x = 0. tau in (0,1).
std::vector<int> support_of(const Eigen::VectorXd& x, double tau);

// True iff the thresholded support of x_hat equals the exact support of
// x_true.
bool recovery_success(const Eigen::VectorXd& x_hat,
                      const Eigen::VectorXd& x_true, double tau);

// ||x_true - x_hat||_2 / ||x_true||_2.
double normalized_error(const Eigen::VectorXd& x_hat,
                        const Eigen::VectorXd& x_true);

// l1 mass of x_hat outside the true support.
double spurious_power(const Eigen::VectorXd& x_hat,
                      std::span<const int> true_support);

// IDW interpolation, power 2, distances clamped at the scenario's d_floor.
ReliabilityMap reliability_raster(const Scenario& sc, const Eigen::VectorXd& r,
                                  int resolution);

double mean_reliability(const Eigen::VectorXd& r);

// Plain-text PGM (P2, 8-bit), cell value round(255 * r).
void write_pgm(const ReliabilityMap& map, std::ostream& out);
std::string to_pgm_string(const ReliabilityMap& map);

nlohmann::json reliability_map_to_json(const ReliabilityMap& map);

}  // namespace specsense
