#include <doctest.h>

#include "nlb/dp_approx.hpp"
#include "nlb/exact_oracle.hpp"
#include "support/random_instances.hpp"

using namespace nlb;

namespace {

CurtailmentInstance two_node(int T = 1, double cap = 10) {
  auto instance = testing::empty_instance(2, 2, T);
  for (int t = 0; t < T; ++t) {
    instance.curtailment[t] = {{0, 5}, {0, 4}};
    instance.cost[t] = {{0, 50}, {0, 32}};
    instance.interval_targets[t] = 7;
  }
  instance.aggregate_cap = cap;
  return instance;
}

ThetaTable two_node_table() {
  std::vector<NodeOptions> nodes{{{0, 0.0, 0}, {8, 50.0, 1}}, {{0, 0.0, 0}, {6, 32.0, 1}}};
  return build_theta_table(nodes, 15);
}

}  // namespace

TEST_CASE("scale factor and rounded curtailment") {
  const auto instance = two_node();
  const auto scaled = scale_instance(instance, 0.2);
  CHECK(scaled.mu == doctest::Approx(0.7));
  CHECK(scaled.rounded_curtailment[0][0][1] == 8);
  CHECK(scaled.rounded_curtailment[0][1][1] == 6);
  CHECK(scaled.rounded_curtailment[0][0][0] == 0);
  CHECK(scaled.rounded_targets[0] == 10);
  CHECK(scaled.rounded_cap == 15);
  CHECK(scaled.search_cap == 17);  // floor(1.2 * 10 / 0.7)
  CHECK(round_up_units(0.0, 0.3) == 0);
  CHECK(round_up_units(5.0, 0.7) == 8);
}

TEST_CASE("exact multiples are not pushed up by float noise") {
  // 0.7 * 10 / 0.7 is not exactly 10 in binary floating point.
  CHECK(round_up_units(7.0, 0.7) == 10);
  CHECK(round_up_units(0.3, 0.1) == 3);
}

TEST_CASE("scaling errors") {
  auto instance = two_node();
  CHECK_THROWS_AS(scale_instance(instance, 0.0), ScalingError);
  CHECK_THROWS_AS(scale_instance(instance, 1.5), ScalingError);
  try {
    scale_instance(instance, -0.1);
  } catch (const ScalingError& e) {
    CHECK(e.kind() == ScalingError::Kind::EpsilonOutOfRange);
  }
  instance.interval_targets = {0};
  try {
    scale_instance(instance, 0.1);
    FAIL("expected ZeroTarget");
  } catch (const ScalingError& e) {
    CHECK(e.kind() == ScalingError::Kind::ZeroTarget);
  }
  CHECK_NOTHROW(scale_instance(two_node(), 1.0));
}

TEST_CASE("rounding stays within one unit") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const auto instance = testing::random_real_instance(rng, {4, 4, 3});
    const double eps = testing::real(rng, 0.01, 1.0);
    const auto scaled = scale_instance(instance, eps);
    CHECK(scaled.mu == doctest::Approx(eps * instance.min_target() / instance.num_nodes));
    for (int t = 0; t < instance.num_intervals; ++t)
      for (int b = 0; b < instance.num_nodes; ++b)
        for (int j = 0; j < instance.num_strategies; ++j) {
          const double q = instance.curtailment[t][b][j] / scaled.mu;
          const auto r = scaled.rounded_curtailment[t][b][j];
          CHECK(static_cast<double>(r) >= q * (1 - 1e-12));
          CHECK(static_cast<double>(r) < q + 1);
          if (instance.curtailment[t][b][j] == 0.0) CHECK(r == 0);
        }
  }
}

TEST_CASE("theta single node base case") {
  std::vector<NodeOptions> nodes{{{0, 0.0, 0}, {8, 50.0, 1}}};
  const auto theta = build_theta_table(nodes, 10);
  CHECK(theta.cost(8, 1) == 50.0);
  CHECK(theta.cost(3, 1) == kInfeasibleCost);
  CHECK(theta.cost(0, 1) == 0.0);
}

TEST_CASE("theta two-node table") {
  const auto theta = two_node_table();
  CHECK(theta.cost(14, 2) == 82.0);
  CHECK(theta.cost(6, 2) == 32.0);
  CHECK(theta.cost(8, 2) == 50.0);
  CHECK(theta.cost(0, 2) == 0.0);
  CHECK(theta.cost(7, 2) == kInfeasibleCost);
  CHECK(theta.cost(-1, 2) == kInfeasibleCost);
  CHECK(theta.cost(99, 2) == kInfeasibleCost);
}

TEST_CASE("reconstruct the two-node table") {
  const auto theta = two_node_table();
  CHECK(reconstruct_interval(theta, 14, 82.0) == std::vector<int>{1, 1});
  CHECK(reconstruct_interval(theta, 0, 0.0) == std::vector<int>{0, 0});
  CHECK(reconstruct_interval(theta, 6, 32.0) == std::vector<int>{0, 1});
  CHECK(reconstruct_interval_by_argmin(theta, 14, 82.0) == std::vector<int>{1, 1});
  CHECK(reconstruct_interval_by_argmin(theta, 6, 32.0) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(reconstruct_interval(theta, 7, 10.0), InconsistentTable);
  CHECK_THROWS_AS(reconstruct_interval(theta, 14, 81.0), InconsistentTable);
}

TEST_CASE("candidate set keeps finite entries at or above the target") {
  const auto theta = two_node_table();
  const auto s = candidate_set(theta, 10);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == IntervalChoice{82.0, 14});
  CHECK(candidate_set(theta, 0).size() == 4);
}

TEST_CASE("solve the two-node example") {
  const auto solution = solve_mcnlb(two_node(), 0.2);
  REQUIRE(solution);
  CHECK(solution->cost == 82.0);
  CHECK(solution->schedule.assignment == std::vector<std::vector<int>>{{1, 1}});
  const auto report = evaluate(two_node(), solution->schedule);
  CHECK(report.per_interval_curtailment[0] == 9.0);
}

TEST_CASE("unreachable target is infeasible") {
  auto instance = testing::empty_instance(2, 1, 1);
  instance.interval_targets = {1e-6};
  instance.aggregate_cap = 1;
  CHECK_FALSE(solve_mcnlb(instance, 0.1).has_value());
}

TEST_CASE("two-interval example") {
  const auto instance = two_node(2, 18);
  const auto solution = solve_mcnlb(instance, 0.2);
  REQUIRE(solution);
  CHECK(solution->cost == 164.0);
  const auto report = evaluate(instance, solution->schedule);
  CHECK(report.per_interval_curtailment == std::vector<double>{9.0, 9.0});
  REQUIRE(solution->trace.size() == 2);
  CHECK(solution->trace[0] == IntervalChoice{82.0, 14});
  CHECK(solution->total_units == 28);
}

TEST_CASE("theta entries are realized by their reconstruction") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 60; ++k) {
    const auto instance = testing::random_real_instance(rng, {5, 4, 2});
    const auto scaled = scale_instance(instance, testing::real(rng, 0.05, 1.0));
    for (int t = 0; t < instance.num_intervals; ++t) {
      const auto theta = build_theta(scaled, instance, t);
      const int M = instance.num_nodes;
      for (std::int64_t g = 0; g <= theta.max_units(); ++g) {
        const double c = theta.cost(g, M);
        if (c == kInfeasibleCost) continue;
        const auto picks = reconstruct_interval(theta, g, c);
        std::int64_t units = 0;
        double cost = 0.0;
        for (int b = 0; b < M; ++b) {
          units += scaled.rounded_curtailment[t][b][picks[b]];
          cost += instance.cost[t][b][picks[b]];
        }
        CHECK(units == g);
        CHECK(cost == doctest::Approx(c));
        CHECK(reconstruct_interval_by_argmin(theta, g, c) == picks);
      }
    }
  }
}

TEST_CASE("phi trace sums to the chosen total") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 60; ++k) {
    const auto instance = testing::random_real_instance(rng, {4, 3, 4});
    const auto solution = solve_mcnlb(instance, 0.3);
    if (!solution) continue;
    std::int64_t units = 0;
    double cost = 0.0;
    for (const auto& c : solution->trace) {
      units += c.units;
      cost += c.cost;
    }
    CHECK(units == solution->total_units);
    CHECK(cost == doctest::Approx(solution->cost));
  }
}

TEST_CASE("unit scaling reproduces the exact optimum") {
  std::mt19937_64 rng(31);
  int compared = 0;
  for (int k = 0; k < 300; ++k) {
    auto instance = testing::random_integer_instance(rng, {4, 3, 3}, k % 4 != 0);
    const auto exact = brute_force(instance, Problem::Mcnlb);
    const auto dp = solve_scaled(instance, unit_scale(instance));
    REQUIRE(exact.has_value() == dp.has_value());
    if (exact) {
      CHECK(dp->cost == doctest::Approx(exact->cost));
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("unit scaling rejects fractional data") {
  auto instance = two_node();
  instance.curtailment[0][0][1] = 5.5;
  CHECK_THROWS_AS(unit_scale(instance), ScalingError);
}

TEST_CASE("approximation bounds and cost dominance on random instances") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 80; ++k) {
    const auto instance = testing::random_real_instance(rng, {3, 3, 3});
    const auto exact = brute_force(instance, Problem::Mcnlb);
    REQUIRE(exact);
    for (double eps : {0.5, 0.2, 0.1, 0.05}) {
      const auto dp = solve_mcnlb(instance, eps);
      REQUIRE(dp);
      const auto report = evaluate(instance, dp->schedule);
      for (int t = 0; t < instance.num_intervals; ++t)
        CHECK(report.per_interval_curtailment[t] >= (1 - eps) * instance.interval_targets[t] - 1e-9);
      CHECK(report.aggregate_curtailment <= (1 + eps) * instance.aggregate_cap + 1e-9);
      CHECK(dp->cost <= exact->cost * (1 + 1e-9) + 1e-9);
    }
  }
}

TEST_CASE("output is deterministic") {
  std::mt19937_64 rng(51);
  const auto instance = testing::random_real_instance(rng, {4, 4, 3});
  const auto a = solve_mcnlb(instance, 0.1);
  const auto b = solve_mcnlb(instance, 0.1);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->schedule == b->schedule);
  CHECK(a->cost == b->cost);
}
