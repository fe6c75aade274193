#pragma once

// Minimum-cost balancing with per-node curtailment budgets: solve the LP
// relaxation of the 0-1 program, then round each (node, interval) to the
// strategy nearest to its expected curtailment.

#include <optional>
#include <vector>

#include "nlb/model.hpp"
#include "nlb/simplex.hpp"

namespace nlb {

enum class CostKind { Linear, Quadratic, Custom };
const char* to_string(CostKind kind);

/// Linear when every cost is a*gamma for one a, quadratic when every cost is
/// a*gamma^2, otherwise custom.
CostKind detect_cost_kind(const CurtailmentInstance& instance, double relative_tolerance = 1e-9);

struct FairnessConfig {
  std::vector<NodeBudget> budgets;
  CostKind cost_kind = CostKind::Custom;
};

/// Budgets of the instance plus its detected cost kind. Throws
/// std::invalid_argument when the instance carries no budgets.
FairnessConfig fairness_config(const CurtailmentInstance& instance);

class MissingBudgets : public std::invalid_argument {
 public:
  MissingBudgets() : std::invalid_argument("instance carries no node budgets") {}
};

/// Column of x_bj(t) in the relaxation.
inline int relaxation_variable(const CurtailmentInstance& instance, int t, int b, int j) {
  return (t * instance.num_nodes + b) * instance.num_strategies + j;
}

/// Variables x_bj(t) in [0,1]; rows: T interval targets (>=), the cap (<=),
/// per node a budget floor (>=) and ceiling (<=), and M*T one-strategy
/// equalities, in that order.
LinearProgram build_fair_relaxation(const CurtailmentInstance& instance);

/// Strategies of one (node, interval) sorted by curtailment, duplicates
/// collapsed to the cheapest (then lowest index).
struct StrategyLevel {
  double curtailment = 0.0;
  double cost = 0.0;
  int strategy = 0;
};
std::vector<StrategyLevel> sorted_levels(const CurtailmentInstance& instance, int t, int b);

/// Nearest-level rounding of an expected curtailment. Exact hits keep that
/// level; otherwise the upper level of the bracket is taken when the value is
/// at or above the midpoint.
int round_to_level(const std::vector<StrategyLevel>& levels, double expected, double tolerance = kDefaultTolerance);

struct RoundingDiagnostics {
  std::vector<std::vector<double>> expected_curtailment;  // [t][b]
  /// Smallest k with gamma_{i+1} <= (2k - 1) gamma_i over consecutive positive
  /// levels of every (node, interval); 1 when no such pair exists.
  double spacing_k = 1.0;
  /// Some (node, interval) with positive expected curtailment was rounded down
  /// to zero; the lower-side guarantee does not apply then.
  bool rounded_to_zero = false;
};

Schedule round_fair_solution(const CurtailmentInstance& instance, const LpSolution& fractional,
                             RoundingDiagnostics* diagnostics = nullptr);

struct FairSolution {
  Schedule schedule;
  EvaluationReport report;
  double lp_optimum = 0.0;
  Ratio cost_ratio;  // rounded cost / lp_optimum
  CostKind cost_kind = CostKind::Custom;
  RoundingDiagnostics diagnostics;
  bool lower_guarantee_applies = false;
};

/// nullopt when the relaxation is infeasible.
std::optional<FairSolution> solve_fair(const CurtailmentInstance& instance, const SimplexOptions& options = {});

}  // namespace nlb
