#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "specsense/dynamic_selection.hpp"
#include "specsense/scenario.hpp"

using namespace specsense;

namespace {

ReliabilityState state_for(const Eigen::VectorXd& y_last, double forgetting,
                           const std::vector<int>& t_last) {
  ReliabilityState s = ReliabilityState::fresh(y_last, forgetting);
  s.t_last = t_last;
  return s;
}

double closed_form_pair_min_eig(const Eigen::Matrix2d& gram) {
  const double mid = 0.5 * (gram(0, 0) + gram(1, 1));
  const double rad = std::sqrt(0.25 * (gram(0, 0) - gram(1, 1)) *
                                   (gram(0, 0) - gram(1, 1)) +
                               gram(0, 1) * gram(0, 1));
  return mid - rad;
}

}  // namespace

TEST_CASE("predict_measurement is the model dot product") {
  Rng rng(1);
  const auto a = oracles::random_matrix(rng, 5, 4);
  CHECK(predict_measurement(a, 2, Eigen::VectorXd::Zero(4)) == 0.0);

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  Eigen::VectorXd x(4);
  x << 5, 6, 7, 8;
  CHECK(predict_measurement(eye, 3, x) == doctest::Approx(8.0));

  const auto x_rand = oracles::random_vector(rng, 4);
  double dot = 0.0;
  for (int c = 0; c < 4; ++c) dot += a(1, c) * x_rand(c);
  CHECK(predict_measurement(a, 1, x_rand) == doctest::Approx(dot).epsilon(1e-12));
}

TEST_CASE("update_reliability point values hold to 1e-12") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(1, 1);

  SUBCASE("fresh and exact: r = 1") {
    Eigen::VectorXd y(1), x(1);
    y << 0.7;
    x << 0.7;  // prediction equals y_last
    auto s = state_for(y, 0.5, {4});
    const auto next = update_reliability(s, 4, eye, x);
    CHECK(std::abs(next.r(0) - 1.0) <= 1e-12);
    CHECK(std::abs(next.u(0) - 1.0) <= 1e-12);
  }
  SUBCASE("unit mismatch, no forgetting: r = 1/2") {
    Eigen::VectorXd y(1), x(1);
    y << 1.5;
    x << 0.5;
    auto s = state_for(y, 0.0, {0});
    const auto next = update_reliability(s, 9, eye, x);
    CHECK(std::abs(next.r(0) - 0.5) <= 1e-12);
    CHECK(std::abs(next.u(0) - 2.0) <= 1e-12);
  }
  SUBCASE("ten stale blocks at 0.1 decay: r = 1/e") {
    Eigen::VectorXd y(1), x(1);
    y << 0.3;
    x << 0.3;
    auto s = state_for(y, 0.1, {2});
    const auto next = update_reliability(s, 12, eye, x);
    CHECK(std::abs(next.r(0) - std::exp(-1.0)) <= 1e-12);
  }
}

TEST_CASE("reliability bounds and monotonicity") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3), x(3);
  y << 10.0, 0.0, -3.0;
  x << 0.0, 0.0, -3.0;
  auto s = state_for(y, 0.3, {0, 0, 0});

  SUBCASE("r stays in [floor, 1], u >= 1") {
    for (const int t : {0, 5, 100, 10000}) {
      const auto next = update_reliability(s, t, eye, x);
      for (int i = 0; i < 3; ++i) {
        CHECK(next.r(i) >= kReliabilityFloor);
        CHECK(next.r(i) <= 1.0);
        CHECK(next.u(i) >= 1.0);
      }
    }
  }
  SUBCASE("freshness: r nonincreasing in the age") {
    double prev = 2.0;
    for (int t = 0; t < 20; ++t) {
      const auto next = update_reliability(s, t, eye, x);
      CHECK(next.r(2) <= prev);
      prev = next.r(2);
    }
  }
  SUBCASE("mismatch: r strictly decreasing in |y - prediction|") {
    double prev = 2.0;
    for (const double mismatch : {0.0, 0.5, 1.0, 4.0}) {
      Eigen::VectorXd yy(3);
      yy << mismatch, 0.0, 0.0;
      auto state = state_for(yy, 0.0, {0, 0, 0});
      const auto next = update_reliability(state, 0, eye, Eigen::VectorXd::Zero(3));
      CHECK(next.r(0) < prev);
      prev = next.r(0);
    }
  }
}

TEST_CASE("reliable_greedy_select: gamma = 0 reproduces greedy_eoptimal") {
  Rng rng(2);
  const auto a = oracles::random_matrix(rng, 12, 5);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(12);
  for (int init = 0; init < 12; init += 3) {
    const auto static_pick = greedy_eoptimal(a, 5, init, 7);
    const auto dynamic_pick = reliable_greedy_select(a, ones, 5, 0.0, 7, init);
    CHECK(dynamic_pick.selected == static_pick.selected);
    CHECK(dynamic_pick.objective_trace == static_pick.objective_trace);
  }
}

TEST_CASE("reliable_greedy_select: huge gamma ranks by unreliability") {
  Rng rng(3);
  const auto a = oracles::random_matrix(rng, 8, 4);
  Eigen::VectorXd u(8);
  u << 3, 9, 1.5, 12, 2, 7, 4, 5;
  const auto pick = reliable_greedy_select(a, u, 4, 1e9, 0);
  CHECK(pick.selected == std::vector<int>{3, 1, 5, 7});
}

TEST_CASE("reliable_greedy_select: scores match a hand-built sweep") {
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 2, 1, 1;
  Eigen::VectorXd u(3);
  u << 1, 2, 3;
  const double gamma = 0.5;

  // Step 1: ||a_m||^2 + gamma u_m^2 = {1.5, 6, 6.5} -> sensor 2.
  // Step 2: pair Grams with sensor 2, closed-form min eigenvalues.
  Eigen::Matrix2d g20, g21;
  g20 << 2, 1, 1, 1;
  g21 << 2, 2, 2, 4;
  const double score0 = closed_form_pair_min_eig(g20) + gamma * 1.0;
  const double score1 = closed_form_pair_min_eig(g21) + gamma * 4.0;
  REQUIRE(score1 > score0);

  const auto pick = reliable_greedy_select(a, u, 2, gamma, 0);
  CHECK(pick.selected == std::vector<int>{2, 1});
  CHECK(pick.objective_trace[1] ==
        doctest::Approx(closed_form_pair_min_eig(g21) + gamma * (9.0 + 4.0))
            .epsilon(1e-12));
}

TEST_CASE("reliable_greedy_select validates unreliability") {
  Rng rng(4);
  const auto a = oracles::random_matrix(rng, 4, 2);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(4);
  u(2) = 0.0;
  CHECK_THROWS_AS(reliable_greedy_select(a, u, 2, 1.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      reliable_greedy_select(a, Eigen::VectorXd::Ones(4), 5, 1.0, 0),
      std::invalid_argument);
}

TEST_CASE("low_rate_schedule: round-robin partition") {
  CHECK(low_rate_schedule(4, 1, 7) == std::vector<int>{0, 1, 2, 3});
  CHECK(low_rate_schedule(6, 3, 0) == std::vector<int>{0, 3});
  CHECK(low_rate_schedule(6, 3, 1) == std::vector<int>{1, 4});

  // Any window of n_l consecutive blocks observes each sensor exactly once.
  std::vector<int> seen(11, 0);
  for (int t = 5; t < 5 + 4; ++t)
    for (const int m : low_rate_schedule(11, 4, t)) ++seen[static_cast<std::size_t>(m)];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

namespace {

std::vector<TruthSegment> static_truth(const Scenario& sc, int blocks) {
  return {TruthSegment{0, blocks - 1, sc.true_power}};
}

}  // namespace

TEST_CASE("run_online: degenerate single block equals static initialization") {
  const auto sc = build_scenario({4, 10.0}, 20, 2, 25.0, 3);
  OnlineConfig cfg;
  cfg.active_count = 4;
  cfg.low_rate_denominator = 5;
  cfg.blocks = 1;
  cfg.seed = 99;
  const auto schedule = static_truth(sc, 1);
  const auto records = run_online(sc, schedule, cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].t == 0);
  CHECK(records[0].active_set.size() == 4);
  CHECK(records[0].reliability == Eigen::VectorXd::Ones(20));
  CHECK(records[0].sampled_low_rate == low_rate_schedule(20, 5, 0));
}

TEST_CASE("run_online: static truth with gamma 0 settles to a fixed set") {
  const auto sc = build_scenario({4, 10.0}, 25, 3, 30.0, 5);
  OnlineConfig cfg;
  cfg.active_count = 5;
  cfg.low_rate_denominator = 4;
  cfg.gamma = 0.0;
  cfg.forgetting = 0.0;
  cfg.blocks = 8;
  cfg.seed = 17;
  const auto records = run_online(sc, static_truth(sc, 8), cfg);
  REQUIRE(records.size() == 8);
  // gamma = 0 reselection is measurement-independent, so blocks 1.. agree.
  for (std::size_t t = 2; t < records.size(); ++t)
    CHECK(records[t].active_set == records[1].active_set);
}

TEST_CASE("run_online: n_l = 1 keeps every sensor fresh") {
  const auto sc = build_scenario({3, 10.0}, 12, 2, 25.0, 8);
  OnlineConfig cfg;
  cfg.active_count = 3;
  cfg.low_rate_denominator = 1;
  cfg.gamma = 0.2;
  cfg.blocks = 5;
  cfg.seed = 4;

  // With every sensor sampled every block the freshness numerator is 1, so
  // the forgetting rate cannot matter.
  OnlineConfig heavy = cfg;
  heavy.forgetting = 50.0;
  cfg.forgetting = 0.0;
  const auto a = run_online(sc, static_truth(sc, 5), cfg);
  const auto b = run_online(sc, static_truth(sc, 5), heavy);
  for (std::size_t t = 0; t < a.size(); ++t)
    CHECK(a[t].reliability == b[t].reliability);
}

TEST_CASE("run_online: 3-state schedule shows reliability drops at transitions") {
  const auto sc = build_scenario({6, 10.0}, 40, 5, 25.0, 21);
  Rng rng(31);
  const auto support = [&](std::uint64_t seed) {
    Eigen::VectorXd power = Eigen::VectorXd::Zero(36);
    Rng local(seed);
    for (int i = 0; i < 5;) {
      const int s = static_cast<int>(local.below(36));
      if (power(s) == 0.0) {
        power(s) = 1.0;
        ++i;
      }
    }
    return power;
  };
  const std::vector<TruthSegment> moving = {{0, 23, support(1)},
                                            {24, 58, support(2)},
                                            {59, 89, support(3)}};
  const std::vector<TruthSegment> frozen = {{0, 89, support(1)}};

  OnlineConfig cfg;
  cfg.active_count = 8;
  cfg.low_rate_denominator = 30;
  cfg.gamma = 0.0;  // identical selections in both runs
  cfg.forgetting = 0.1;
  cfg.blocks = 90;
  cfg.seed = 6;

  const auto dynamic_run = run_online(sc, moving, cfg);
  const auto static_run = run_online(sc, frozen, cfg);
  REQUIRE(dynamic_run.size() == 90);

  for (const int t : {24, 59}) {
    const double moved =
        dynamic_run[static_cast<std::size_t>(t)].reliability.mean();
    const double still =
        static_run[static_cast<std::size_t>(t)].reliability.mean();
    CHECK(moved < still);
  }
}

TEST_CASE("run_online rejects schedule gaps") {
  const auto sc = build_scenario({3, 10.0}, 10, 2, 20.0, 2);
  const std::vector<TruthSegment> gappy = {{0, 2, sc.true_power},
                                           {5, 9, sc.true_power}};
  OnlineConfig cfg;
  cfg.active_count = 2;
  cfg.blocks = 10;
  CHECK_THROWS_AS(run_online(sc, gappy, cfg), std::invalid_argument);
}

TEST_CASE("run_online is deterministic in the seed") {
  const auto sc = build_scenario({4, 10.0}, 15, 2, 20.0, 9);
  OnlineConfig cfg;
  cfg.active_count = 4;
  cfg.low_rate_denominator = 3;
  cfg.gamma = 0.7;
  cfg.blocks = 6;
  cfg.seed = 12;
  const auto a = run_online(sc, static_truth(sc, 6), cfg);
  const auto b = run_online(sc, static_truth(sc, 6), cfg);
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a[t].active_set == b[t].active_set);
    CHECK(a[t].estimate == b[t].estimate);
    CHECK(a[t].reliability == b[t].reliability);
  }
}
