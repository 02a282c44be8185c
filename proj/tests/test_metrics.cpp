#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <numeric>

#include "oracles.hpp"
#include "specsense/metrics.hpp"
#include "specsense/recovery.hpp"
#include "specsense/scenario.hpp"

using namespace specsense;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v(i++) = x;
  return v;
}

// Hand-assembled scenario with known sensor positions.
Scenario tiny_scenario(const std::vector<Point>& positions) {
  Scenario sc;
  sc.grid = GridSpec{2, 10.0};
  sc.sensor_positions = positions;
  const int n = sc.grid.point_count();
  sc.gain.resize(static_cast<Eigen::Index>(positions.size()), n);
  for (std::size_t m = 0; m < positions.size(); ++m)
    for (int s = 0; s < n; ++s)
      sc.gain(static_cast<Eigen::Index>(m), s) =
          gain_between(positions[m], sc.grid.point(s), sc.d_floor());
  sc.true_power = Eigen::VectorXd::Zero(n);
  return sc;
}

}  // namespace

TEST_CASE("support_of thresholds relative to the peak") {
  CHECK(support_of(vec({1.0, 0.001, 0.0}), 0.05) == std::vector<int>{0});
  CHECK(support_of(vec({0.0, 0.0, 0.0}), 0.05).empty());
  CHECK(support_of(vec({-0.3, 0.3, 0.3}), 0.5) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(support_of(vec({1.0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(support_of(vec({1.0}), 1.0), std::invalid_argument);
}

TEST_CASE("recovery_success compares thresholded vs exact support") {
  const auto truth = vec({0.0, 1.0, 0.0, 1.0});
  CHECK(recovery_success(truth, truth, 0.05));
  CHECK_FALSE(recovery_success(vec({0.0, 0.0, 0.0, 0.0}), truth, 0.05));
  CHECK(recovery_success(vec({0.01, 0.9, -0.02, 1.1}), truth, 0.05));
}

TEST_CASE("noiseless full-observation recovery always succeeds") {
  int successes = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto sc = build_scenario({4, 10.0}, 25, 2, 20.0,
                             static_cast<std::uint64_t>(trial));
    sc.noise_std = 0.0;
    const auto meas = sample_measurements(sc, 1);
    std::vector<int> all(25);
    std::iota(all.begin(), all.end(), 0);
    LassoConfig cfg;
    cfg.lambda = 1e-6 * default_lasso_lambda(sc.gain, meas.values, all);
    const auto rec = irls_lasso(sc.gain, meas.values, all, cfg);
    if (recovery_success(rec.estimate, sc.true_power, 0.05)) ++successes;
  }
  CHECK(successes == 100);
}

TEST_CASE("normalized_error arithmetic") {
  const auto truth = vec({3.0, 0.0, -4.0});
  CHECK(normalized_error(truth, truth) == doctest::Approx(0.0));
  CHECK(normalized_error(vec({0.0, 0.0, 0.0}), truth) == doctest::Approx(1.0));
  CHECK(normalized_error(2.0 * truth, truth) == doctest::Approx(1.0));
  CHECK_THROWS_AS(normalized_error(truth, vec({0.0, 0.0, 0.0})),
                  std::invalid_argument);
}

TEST_CASE("spurious_power sums off-support magnitude") {
  CHECK(spurious_power(vec({0.1, 2.0, 0.0}), std::vector<int>{1}) ==
        doctest::Approx(0.1));
  CHECK(spurious_power(vec({0.0, 2.0, 0.0}), std::vector<int>{1}) ==
        doctest::Approx(0.0));
  const auto x = vec({0.5, -1.5, 2.0});
  CHECK(spurious_power(x, std::vector<int>{}) == doctest::Approx(4.0));
  CHECK(spurious_power(x, std::vector<int>{0, 1, 2}) == doctest::Approx(0.0));
}

TEST_CASE("reliability_raster: constant field is a fixpoint") {
  Rng rng(1);
  std::vector<Point> positions;
  for (int m = 0; m < 6; ++m)
    positions.push_back({rng.uniform(0, 10), rng.uniform(0, 10)});
  const auto sc = tiny_scenario(positions);
  const auto map =
      reliability_raster(sc, 0.37 * Eigen::VectorXd::Ones(6), 5);
  CHECK(map.width == 5);
  CHECK(map.height == 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      CHECK(map.values(r, c) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("reliability_raster: coincident cell takes the sensor value") {
  // Resolution 4 over extent 10 puts a cell center at (1.25, 1.25).
  std::vector<Point> positions{{1.25, 1.25}, {8.0, 9.0}, {5.5, 2.0}};
  const auto sc = tiny_scenario(positions);
  Eigen::VectorXd r(3);
  r << 0.9, 0.2, 0.4;
  const auto map = reliability_raster(sc, r, 4);
  CHECK(std::abs(map.values(0, 0) - 0.9) <= 1e-3);
}

TEST_CASE("reliability_raster: convex bounds and permutation invariance") {
  Rng rng(2);
  std::vector<Point> positions;
  Eigen::VectorXd r(8);
  for (int m = 0; m < 8; ++m) {
    positions.push_back({rng.uniform(0, 10), rng.uniform(0, 10)});
    r(m) = rng.uniform(0.05, 1.0);
  }
  const auto sc = tiny_scenario(positions);
  const auto map = reliability_raster(sc, r, 6);
  for (int row = 0; row < 6; ++row)
    for (int col = 0; col < 6; ++col) {
      CHECK(map.values(row, col) >= r.minCoeff() - 1e-12);
      CHECK(map.values(row, col) <= r.maxCoeff() + 1e-12);
    }

  std::vector<Point> shuffled = positions;
  Eigen::VectorXd r_shuffled = r;
  std::swap(shuffled[0], shuffled[5]);
  std::swap(r_shuffled(0), r_shuffled(5));
  std::swap(shuffled[2], shuffled[7]);
  std::swap(r_shuffled(2), r_shuffled(7));
  const auto map2 = reliability_raster(tiny_scenario(shuffled), r_shuffled, 6);
  CHECK((map.values - map2.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("mean_reliability") {
  CHECK(mean_reliability(Eigen::VectorXd::Ones(7)) == doctest::Approx(1.0));
  CHECK(mean_reliability(vec({1.0, 0.0})) == doctest::Approx(0.5));
  Rng rng(3);
  const auto r = oracles::random_vector(rng, 11);
  double sum = 0.0;
  for (int i = 0; i < 11; ++i) sum += r(i);
  CHECK(mean_reliability(r) == doctest::Approx(sum / 11.0).epsilon(1e-12));
}

TEST_CASE("PGM export is the documented P2 layout") {
  ReliabilityMap map;
  map.width = 2;
  map.height = 2;
  map.extent = 10.0;
  map.values.resize(2, 2);
  map.values << 1.0, 0.0, 0.5, 0.21;
  CHECK(to_pgm_string(map) == "P2\n2 2\n255\n255 0\n128 54\n");
}

TEST_CASE("reliability map JSON carries the grid") {
  ReliabilityMap map;
  map.width = 2;
  map.height = 1;
  map.extent = 4.0;
  map.values.resize(1, 2);
  map.values << 0.25, 0.75;
  const auto j = reliability_map_to_json(map);
  CHECK(j["width"] == 2);
  CHECK(j["height"] == 1);
  CHECK(j["extent"] == 4.0);
  CHECK(j["values"][0][1] == 0.75);
}
