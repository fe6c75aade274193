#include <doctest.h>

#include <cmath>
#include <limits>

#include "nlb/model.hpp"
#include "support/random_instances.hpp"

using namespace nlb;

namespace {

CurtailmentInstance two_node() {
  auto instance = testing::empty_instance(2, 2, 1);
  instance.curtailment = {{{0, 5}, {0, 4}}};
  instance.cost = {{{0, 50}, {0, 32}}};
  instance.interval_targets = {7};
  instance.aggregate_cap = 10;
  return instance;
}

bool has_kind(const std::vector<ValidationIssue>& issues, ValidationErrorKind kind) {
  for (const auto& i : issues)
    if (i.kind == kind) return true;
  return false;
}

}  // namespace

TEST_CASE("validate rejects targets above the cap") {
  auto instance = testing::empty_instance(1, 1, 2);
  instance.interval_targets = {6, 6};
  instance.aggregate_cap = 10;
  const auto issues = validate(instance);
  CHECK(has_kind(issues, ValidationErrorKind::TargetsExceedCap));
  CHECK_THROWS_AS(require_valid(instance), ValidationError);
}

TEST_CASE("default-only instance is valid") {
  auto instance = testing::empty_instance(1, 1, 1);
  CHECK(validate(instance).empty());
  CHECK(&require_valid(instance) == &instance);
}

TEST_CASE("cost shape mismatch") {
  auto instance = two_node();
  instance.cost = {{{0}, {0}}};
  CHECK(has_kind(validate(instance), ValidationErrorKind::ShapeMismatch));
}

TEST_CASE("validate reports every issue, not just the first") {
  auto instance = two_node();
  instance.curtailment[0][0] = {1, 5};  // no default for node 0
  instance.cost[0][1][1] = -3;
  instance.interval_targets = {12};
  instance.aggregate_cap = 10;
  instance.budgets = std::vector<NodeBudget>{{1.5, 2.0}, {0.0, 1.0}};
  const auto issues = validate(instance);
  CHECK(has_kind(issues, ValidationErrorKind::MissingDefaultStrategy));
  CHECK(has_kind(issues, ValidationErrorKind::NegativeValue));
  CHECK(has_kind(issues, ValidationErrorKind::TargetsExceedCap));
  CHECK(has_kind(issues, ValidationErrorKind::InvalidBudget));
  try {
    require_valid(instance);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == issues.size());
  }
}

TEST_CASE("non-finite values are rejected") {
  auto instance = two_node();
  instance.cost[0][0][1] = std::numeric_limits<double>::quiet_NaN();
  CHECK(has_kind(validate(instance), ValidationErrorKind::NonFiniteValue));
}

TEST_CASE("budget floors above the cap are rejected") {
  auto instance = two_node();
  instance.budgets = std::vector<NodeBudget>{{1.0, 8.0}, {1.0, 8.0}};
  CHECK(has_kind(validate(instance), ValidationErrorKind::InvalidBudget));
}

TEST_CASE("default strategy may sit at any index") {
  auto instance = two_node();
  instance.curtailment[0][0] = {5, 0};
  instance.cost[0][0] = {50, 0};
  CHECK(validate(instance).empty());
}

TEST_CASE("evaluate the two-node example") {
  const auto instance = two_node();
  const auto report = evaluate(instance, Schedule{{{1, 1}}});
  CHECK(report.total_cost == 82.0);
  CHECK(report.per_interval_curtailment[0] == 9.0);
  CHECK(report.aggregate_curtailment == 9.0);
  CHECK(report.per_node_curtailment == std::vector<double>{5.0, 4.0});
  CHECK(*report.target_violation_factors[0] == doctest::Approx(9.0 / 7.0));
  CHECK(*report.cap_violation_factor == doctest::Approx(0.9));
  CHECK_FALSE(report.budget_violation_factors.has_value());
}

TEST_CASE("all-default schedule evaluates to zero") {
  const auto instance = two_node();
  const auto report = evaluate(instance, Schedule::all_default(1, 2));
  CHECK(report.total_cost == 0.0);
  CHECK(report.aggregate_curtailment == 0.0);
  CHECK(report.per_interval_curtailment[0] == 0.0);
}

TEST_CASE("exactly met target has factor one") {
  auto instance = testing::empty_instance(1, 2, 1);
  instance.curtailment = {{{0, 4}}};
  instance.cost = {{{0, 32}}};
  instance.interval_targets = {4};
  instance.aggregate_cap = 4;
  const auto report = evaluate(instance, Schedule{{{1}}});
  CHECK(*report.target_violation_factors[0] == 1.0);
  CHECK(*report.worst_target_factor() == 1.0);
}

TEST_CASE("zero denominators are undefined, not numbers") {
  auto instance = testing::empty_instance(1, 2, 2);
  instance.curtailment = {{{0, 4}}, {{0, 4}}};
  instance.cost = {{{0, 1}}, {{0, 1}}};
  instance.interval_targets = {0, 3};
  instance.aggregate_cap = 8;
  instance.budgets = std::vector<NodeBudget>{{0.0, 0.0}};
  const auto report = evaluate(instance, Schedule{{{1}, {1}}});
  CHECK_FALSE(report.target_violation_factors[0].has_value());
  CHECK(report.target_violation_factors[1].has_value());
  CHECK_FALSE((*report.budget_violation_factors)[0].lower.has_value());
  CHECK_FALSE((*report.budget_violation_factors)[0].upper.has_value());
  CHECK(*report.worst_target_factor() == doctest::Approx(4.0 / 3.0));
  CHECK_FALSE(safe_ratio(1.0, 0.0).has_value());
}

TEST_CASE("budget factors") {
  auto instance = two_node();
  instance.budgets = std::vector<NodeBudget>{{0.5, 10.0}, {0.0, 2.0}};
  const auto report = evaluate(instance, Schedule{{{1, 1}}});
  const auto& f = *report.budget_violation_factors;
  CHECK(*f[0].lower == doctest::Approx(1.0));
  CHECK(*f[0].upper == doctest::Approx(0.5));
  CHECK_FALSE(f[1].lower.has_value());
  CHECK(*f[1].upper == doctest::Approx(2.0));
  CHECK(*report.worst_budget_upper_factor() == doctest::Approx(2.0));
  CHECK(*report.worst_budget_lower_factor() == doctest::Approx(1.0));
}

TEST_CASE("evaluate rejects schedules that do not fit") {
  const auto instance = two_node();
  CHECK_THROWS_AS(evaluate(instance, Schedule{{{1, 2}}}), std::out_of_range);
  CHECK_THROWS_AS(evaluate(instance, Schedule{{{1}}}), std::out_of_range);
  CHECK_THROWS_AS(evaluate(instance, Schedule{{{0, 0}, {0, 0}}}), std::out_of_range);
  CHECK_THROWS_AS(evaluate(instance, Schedule{{{-1, 0}}}), std::out_of_range);
  CHECK_FALSE(schedule_fits(instance, Schedule{{{1, 2}}}));
}

TEST_CASE("total cost matches triple-loop summation") {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 200; ++k) {
    const auto instance = testing::random_integer_instance(rng, {5, 4, 4}, k % 2 == 0);
    const auto schedule = testing::random_schedule(rng, instance);
    const auto report = evaluate(instance, schedule);
    CHECK(report.total_cost == doctest::Approx(testing::direct_cost(instance, schedule)));
    const auto [per, total] = testing::achieved(instance, schedule);
    CHECK(report.aggregate_curtailment == doctest::Approx(total));
    for (int t = 0; t < instance.num_intervals; ++t) CHECK(report.per_interval_curtailment[t] == doctest::Approx(per[t]));
  }
}

TEST_CASE("evaluate is additive over interval slices") {
  std::mt19937_64 rng(202);
  for (int k = 0; k < 100; ++k) {
    const auto instance = testing::random_integer_instance(rng, {4, 3, 5}, true);
    const auto schedule = testing::random_schedule(rng, instance);
    const auto whole = evaluate(instance, schedule);
    const int cut = testing::pick(rng, 0, instance.num_intervals);
    double cost = 0.0, aggregate = 0.0;
    std::vector<double> nodes(instance.num_nodes, 0.0);
    for (auto [first, last] : {std::pair{0, cut}, std::pair{cut, instance.num_intervals}}) {
      if (first == last) continue;
      const auto part = slice_intervals(instance, first, last);
      Schedule sub{{schedule.assignment.begin() + first, schedule.assignment.begin() + last}};
      const auto r = evaluate(part, sub);
      cost += r.total_cost;
      aggregate += r.aggregate_curtailment;
      for (int b = 0; b < instance.num_nodes; ++b) nodes[b] += r.per_node_curtailment[b];
    }
    CHECK(cost == doctest::Approx(whole.total_cost));
    CHECK(aggregate == doctest::Approx(whole.aggregate_curtailment));
    for (int b = 0; b < instance.num_nodes; ++b) CHECK(nodes[b] == doctest::Approx(whole.per_node_curtailment[b]));
  }
}

TEST_CASE("validate is idempotent") {
  std::mt19937_64 rng(303);
  for (int k = 0; k < 50; ++k) {
    auto instance = testing::random_integer_instance(rng, {3, 3, 3}, k % 3 != 0);
    if (k % 5 == 0) instance.aggregate_cap = -1;
    const auto first = validate(instance);
    const auto second = validate(instance);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].kind == second[i].kind);
    if (first.empty()) CHECK(validate(require_valid(instance)).empty());
  }
}
