#pragma once

// Greedy single-interval scheduling when forecasts exist only for the current
// interval. Horizon-level quantities (targets, cap, budgets) come from a past
// horizon and are pro-rated to the current target.

#include <optional>
#include <vector>

#include "nlb/model.hpp"

namespace nlb {

struct OnlineContext {
  double historical_target_total = 0.0;  // sum_t target_t of the past horizon
  double historical_cap = 0.0;
  std::vector<NodeBudget> budgets;

  /// Throws std::invalid_argument unless target total > 0 and cap >= total.
  void check() const;
};

/// Context taken from a complete past horizon (which must carry budgets).
OnlineContext context_from_instance(const CurtailmentInstance& instance);

struct OnlineStep {
  double target = 0.0;
  std::vector<std::vector<double>> curtailment;  // [node][strategy]
  std::vector<std::vector<double>> cost;

  int num_nodes() const { return static_cast<int>(curtailment.size()); }
  void check() const;
};

/// Interval t of an instance as an online step.
OnlineStep step_from_instance(const CurtailmentInstance& instance, int t);

struct OnlineBounds {
  double upper_target = 0.0;        // cap / total * target
  std::vector<double> node_lower;   // alpha_b * B_b
  std::vector<double> node_upper;   // B_b / total * target
};

OnlineBounds derive_online_bounds(const OnlineContext& context, const OnlineStep& step);

struct OnlineOptions {
  double epsilon = 0.1;
  /// Drop the zero strategy too when it lies outside a node's band.
  bool strict_filter = false;
};

struct OnlineSolution {
  std::vector<int> assignment;  // strategy per node
  double cost = 0.0;
  double curtailment = 0.0;
  OnlineBounds bounds;
};

/// nullopt when no filtered combination lands in the target band.
std::optional<OnlineSolution> solve_online(const OnlineContext& context, const OnlineStep& step,
                                           const OnlineOptions& options = {});

}  // namespace nlb
