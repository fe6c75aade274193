#pragma once

// Seeded random instances for property and differential tests. Feasible
// instances are built around a random reference schedule, whose cost is an
// upper bound on the optimum.

#include <algorithm>
#include <random>
#include <utility>

#include "nlb/fair_rounding.hpp"
#include "nlb/model.hpp"

namespace nlb::testing {

struct Shape {
  int max_nodes = 4;
  int max_strategies = 3;
  int max_intervals = 3;
  int min_strategies = 1;
};

inline int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CurtailmentInstance empty_instance(int M, int N, int T) {
  CurtailmentInstance instance;
  instance.num_nodes = M;
  instance.num_strategies = N;
  instance.num_intervals = T;
  instance.curtailment.assign(T, std::vector<std::vector<double>>(M, std::vector<double>(N, 0.0)));
  instance.cost = instance.curtailment;
  instance.interval_targets.assign(T, 0.0);
  return instance;
}

inline Schedule random_schedule(std::mt19937_64& rng, const CurtailmentInstance& instance) {
  Schedule s = Schedule::all_default(instance.num_intervals, instance.num_nodes);
  for (auto& row : s.assignment)
    for (auto& j : row) j = pick(rng, 0, instance.num_strategies - 1);
  return s;
}

/// Per-interval and aggregate sums of a schedule by direct loops.
inline std::pair<std::vector<double>, double> achieved(const CurtailmentInstance& instance, const Schedule& s) {
  std::vector<double> per(instance.num_intervals, 0.0);
  double total = 0.0;
  for (int t = 0; t < instance.num_intervals; ++t)
    for (int b = 0; b < instance.num_nodes; ++b) {
      per[t] += instance.curtailment[t][b][s.assignment[t][b]];
      total += instance.curtailment[t][b][s.assignment[t][b]];
    }
  return {per, total};
}

inline double direct_cost(const CurtailmentInstance& instance, const Schedule& s) {
  double c = 0.0;
  for (int t = 0; t < instance.num_intervals; ++t)
    for (int b = 0; b < instance.num_nodes; ++b) c += instance.cost[t][b][s.assignment[t][b]];
  return c;
}

/// Integer curtailments in [0, 6], integer costs in [0, 30]. Strategy 0 is
/// the default unless shuffled. With `feasible`, targets and cap are derived
/// from a random reference schedule; otherwise targets are random and the
/// instance may be infeasible.
inline CurtailmentInstance random_integer_instance(std::mt19937_64& rng, const Shape& shape, bool feasible) {
  const int M = pick(rng, 1, shape.max_nodes);
  const int N = pick(rng, shape.min_strategies, shape.max_strategies);
  const int T = pick(rng, 1, shape.max_intervals);
  auto instance = empty_instance(M, N, T);
  const bool shuffle = pick(rng, 0, 3) == 0;
  for (int t = 0; t < T; ++t)
    for (int b = 0; b < M; ++b) {
      for (int j = 1; j < N; ++j) {
        instance.curtailment[t][b][j] = pick(rng, 0, 6);
        instance.cost[t][b][j] = pick(rng, 0, 30);
      }
      if (shuffle) {
        const int k = pick(rng, 0, N - 1);
        std::swap(instance.curtailment[t][b][0], instance.curtailment[t][b][k]);
        std::swap(instance.cost[t][b][0], instance.cost[t][b][k]);
      }
    }
  if (feasible) {
    const auto reference = random_schedule(rng, instance);
    const auto [per, total] = achieved(instance, reference);
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
      instance.interval_targets[t] = std::floor(per[t] * real(rng, 0.5, 1.0));
      sum += instance.interval_targets[t];
    }
    instance.aggregate_cap = std::max(sum, total + pick(rng, 0, 4));
  } else {
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
      instance.interval_targets[t] = pick(rng, 0, 6 * M);
      sum += instance.interval_targets[t];
    }
    instance.aggregate_cap = sum + pick(rng, 0, 6);
  }
  return instance;
}

/// Real curtailments in [0.5, 10] with strategy 0 the default and positive
/// targets, feasible by construction. Costs are random (custom kind).
inline CurtailmentInstance random_real_instance(std::mt19937_64& rng, const Shape& shape,
                                                Schedule* reference_out = nullptr) {
  const int M = pick(rng, 1, shape.max_nodes);
  const int N = pick(rng, std::max(2, shape.min_strategies), shape.max_strategies);
  const int T = pick(rng, 1, shape.max_intervals);
  auto instance = empty_instance(M, N, T);
  for (int t = 0; t < T; ++t)
    for (int b = 0; b < M; ++b)
      for (int j = 1; j < N; ++j) {
        instance.curtailment[t][b][j] = real(rng, 0.5, 10.0);
        instance.cost[t][b][j] = real(rng, 0.0, 40.0);
      }
  auto reference = Schedule::all_default(T, M);
  for (int t = 0; t < T; ++t) {
    for (int b = 0; b < M; ++b) reference.assignment[t][b] = pick(rng, 0, N - 1);
    reference.assignment[t][pick(rng, 0, M - 1)] = pick(rng, 1, N - 1);  // positive target
  }
  const auto [per, total] = achieved(instance, reference);
  for (int t = 0; t < T; ++t) instance.interval_targets[t] = per[t] * real(rng, 0.6, 1.0);
  instance.aggregate_cap = total * real(rng, 1.0, 1.6);
  if (reference_out) *reference_out = reference;
  return instance;
}

/// Budgeted instance with cost = a*gamma (Linear) or a*gamma^2 (Quadratic),
/// feasible for the integer program by construction: the reference schedule
/// behind the targets sits inside every node's band.
inline CurtailmentInstance random_budgeted_instance(std::mt19937_64& rng, const Shape& shape, CostKind kind) {
  Schedule reference;
  auto instance = random_real_instance(rng, shape, &reference);
  const double a = real(rng, 0.5, 3.0);
  for (int t = 0; t < instance.num_intervals; ++t)
    for (int b = 0; b < instance.num_nodes; ++b)
      for (int j = 0; j < instance.num_strategies; ++j) {
        const double g = instance.curtailment[t][b][j];
        instance.cost[t][b][j] = kind == CostKind::Linear ? a * g : a * g * g;
      }
  std::vector<double> node(instance.num_nodes, 0.0);
  for (int t = 0; t < instance.num_intervals; ++t)
    for (int b = 0; b < instance.num_nodes; ++b) node[b] += instance.curtailment[t][b][reference.assignment[t][b]];
  std::vector<NodeBudget> budgets(instance.num_nodes);
  for (int b = 0; b < instance.num_nodes; ++b) {
    budgets[b].upper_budget = node[b] * real(rng, 1.0, 1.5);
    budgets[b].lower_fraction =
        budgets[b].upper_budget > 0.0 ? real(rng, 0.0, 0.9) * node[b] / budgets[b].upper_budget : real(rng, 0.0, 1.0);
  }
  instance.budgets = std::move(budgets);
  return instance;
}

}  // namespace nlb::testing
