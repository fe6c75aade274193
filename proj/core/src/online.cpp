#include "nlb/online.hpp"

#include <cmath>
#include <stdexcept>

#include "nlb/dp_approx.hpp"

namespace nlb {

void OnlineContext::check() const {
  if (!(historical_target_total > 0.0)) throw std::invalid_argument("online context needs a positive target total");
  if (!(historical_cap >= historical_target_total))
    throw std::invalid_argument("online context cap must be at least the target total");
  for (const auto& budget : budgets)
    if (budget.upper_budget < 0.0 || budget.lower_fraction < 0.0 || budget.lower_fraction > 1.0)
      throw std::invalid_argument("online context has an invalid node budget");
}

OnlineContext context_from_instance(const CurtailmentInstance& instance) {
  if (!instance.budgets) throw std::invalid_argument("online context needs an instance with budgets");
  OnlineContext context{instance.target_total(), instance.aggregate_cap, *instance.budgets};
  context.check();
  return context;
}

void OnlineStep::check() const {
  if (curtailment.empty() || curtailment.size() != cost.size())
    throw std::invalid_argument("online step needs matching non-empty curtailment and cost matrices");
  for (std::size_t b = 0; b < curtailment.size(); ++b) {
    if (curtailment[b].empty() || curtailment[b].size() != cost[b].size())
      throw std::invalid_argument("online step row " + std::to_string(b) + " has mismatched strategies");
    for (std::size_t j = 0; j < curtailment[b].size(); ++j)
      if (!(curtailment[b][j] >= 0.0) || !(cost[b][j] >= 0.0))
        throw std::invalid_argument("online step values must be non-negative");
  }
  if (!(target >= 0.0) || !std::isfinite(target)) throw std::invalid_argument("online step target must be non-negative");
}

OnlineStep step_from_instance(const CurtailmentInstance& instance, int t) {
  if (t < 0 || t >= instance.num_intervals) throw std::out_of_range("step_from_instance: interval out of range");
  return {instance.interval_targets[t], instance.curtailment[t], instance.cost[t]};
}

OnlineBounds derive_online_bounds(const OnlineContext& context, const OnlineStep& step) {
  context.check();
  if (static_cast<int>(context.budgets.size()) != step.num_nodes())
    throw std::invalid_argument("online context budgets do not match the step's nodes");
  OnlineBounds bounds;
  const double share = step.target / context.historical_target_total;
  bounds.upper_target = context.historical_cap * share;
  for (const auto& budget : context.budgets) {
    bounds.node_lower.push_back(budget.lower_budget());
    bounds.node_upper.push_back(budget.upper_budget * share);
  }
  return bounds;
}

std::optional<OnlineSolution> solve_online(const OnlineContext& context, const OnlineStep& step,
                                           const OnlineOptions& options) {
  step.check();
  if (!(options.epsilon > 0.0 && options.epsilon <= 1.0))
    throw ScalingError(ScalingError::Kind::EpsilonOutOfRange, "online epsilon must lie in (0, 1]");

  OnlineSolution solution;
  solution.bounds = derive_online_bounds(context, step);
  const auto& bounds = solution.bounds;
  const int M = step.num_nodes();

  // Strategies inside each node's band; zero-curtailment strategies survive
  // unless the strict filter is on.
  std::vector<std::vector<int>> kept(M);
  for (int b = 0; b < M; ++b) {
    for (std::size_t j = 0; j < step.curtailment[b].size(); ++j) {
      const double gamma = step.curtailment[b][j];
      const bool in_band = gamma >= bounds.node_lower[b] - kDefaultTolerance &&
                           gamma <= bounds.node_upper[b] + kDefaultTolerance;
      if (in_band || (!options.strict_filter && gamma == 0.0)) kept[b].push_back(static_cast<int>(j));
    }
    if (kept[b].empty()) return std::nullopt;
  }

  auto finish = [&](std::vector<int> assignment) {
    solution.assignment = std::move(assignment);
    solution.cost = 0.0;
    solution.curtailment = 0.0;
    for (int b = 0; b < M; ++b) {
      solution.cost += step.cost[b][solution.assignment[b]];
      solution.curtailment += step.curtailment[b][solution.assignment[b]];
    }
    return solution;
  };

  if (step.target == 0.0) {
    // Nothing to curtail and no room to curtail: every node on its cheapest zero strategy.
    std::vector<int> assignment(M, -1);
    for (int b = 0; b < M; ++b) {
      for (int j : kept[b]) {
        if (step.curtailment[b][j] != 0.0) continue;
        if (assignment[b] < 0 || step.cost[b][j] < step.cost[b][assignment[b]]) assignment[b] = j;
      }
      if (assignment[b] < 0) return std::nullopt;
    }
    return finish(std::move(assignment));
  }

  const double mu = options.epsilon * step.target / M;
  const std::int64_t low_units = round_up_units(step.target, mu);
  const double upper = (1.0 + options.epsilon) * bounds.upper_target;
  const double upper_quotient = upper / mu;
  std::int64_t high_units = static_cast<std::int64_t>(std::floor(upper_quotient));
  if (std::abs(upper_quotient - std::round(upper_quotient)) <= 1e-12 * std::max(1.0, upper_quotient))
    high_units = static_cast<std::int64_t>(std::round(upper_quotient));
  if (high_units < low_units) return std::nullopt;

  std::vector<NodeOptions> nodes(M);
  for (int b = 0; b < M; ++b)
    for (int j : kept[b]) nodes[b].push_back({round_up_units(step.curtailment[b][j], mu), step.cost[b][j], j});

  const ThetaTable theta(std::move(nodes), high_units);
  std::optional<std::int64_t> best;
  double best_cost = kInfeasibleCost;
  for (std::int64_t g = low_units; g <= high_units; ++g) {
    const double c = theta.cost(g, M);
    if (c < best_cost) {
      best_cost = c;
      best = g;
    }
  }
  if (!best) return std::nullopt;
  return finish(reconstruct_interval(theta, *best, best_cost));
}

}  // namespace nlb
