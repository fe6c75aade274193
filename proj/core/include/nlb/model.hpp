#pragma once

// Domain model for curtailment scheduling: the problem instance, a schedule
// (one strategy per node and interval) and the evaluation of a schedule
// against the instance's constraints.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlb {

/// Absolute tolerance (kWh) used for every constraint comparison unless a
/// caller overrides it.
inline constexpr double kDefaultTolerance = 1e-9;

/// [interval][node][strategy]
using Tensor3 = std::vector<std::vector<std::vector<double>>>;

struct NodeBudget {
  double lower_fraction = 0.0;  // alpha_b in [0, 1]
  double upper_budget = 0.0;    // B_b >= 0

  double lower_budget() const { return lower_fraction * upper_budget; }
  friend bool operator==(const NodeBudget&, const NodeBudget&) = default;
};

struct CurtailmentInstance {
  int num_nodes = 0;
  int num_strategies = 0;
  int num_intervals = 0;
  Tensor3 curtailment;  // kWh
  Tensor3 cost;
  std::vector<double> interval_targets;  // kWh, one per interval
  double aggregate_cap = 0.0;            // kWh over the whole horizon
  std::optional<std::vector<NodeBudget>> budgets;

  double curtailment_at(int t, int b, int j) const { return curtailment[t][b][j]; }
  double cost_at(int t, int b, int j) const { return cost[t][b][j]; }
  double target_total() const;
  double min_target() const;

  friend bool operator==(const CurtailmentInstance&, const CurtailmentInstance&) = default;
};

/// assignment[t][b] is the strategy followed by node b in interval t.
struct Schedule {
  std::vector<std::vector<int>> assignment;

  static Schedule all_default(int num_intervals, int num_nodes);
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

enum class ValidationErrorKind {
  ShapeMismatch,
  MissingDefaultStrategy,
  TargetsExceedCap,
  NegativeValue,
  NonFiniteValue,
  InvalidBudget,
};

const char* to_string(ValidationErrorKind kind);

struct ValidationIssue {
  ValidationErrorKind kind;
  std::string detail;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// Every violated invariant of the instance; empty when the instance is valid.
/// Shape problems suppress the value checks that would index out of range.
std::vector<ValidationIssue> validate(const CurtailmentInstance& instance,
                                      double tolerance = kDefaultTolerance);

/// Returns the instance unchanged, or throws ValidationError carrying the
/// full issue list.
const CurtailmentInstance& require_valid(const CurtailmentInstance& instance,
                                         double tolerance = kDefaultTolerance);

/// True when every strategy index is in range and the shape matches.
bool schedule_fits(const CurtailmentInstance& instance, const Schedule& schedule);

/// Ratio with a possibly zero denominator; nullopt stands for "undefined".
using Ratio = std::optional<double>;
Ratio safe_ratio(double numerator, double denominator);

struct BudgetFactors {
  Ratio lower;  // achieved / (alpha_b * B_b)
  Ratio upper;  // achieved / B_b
  friend bool operator==(const BudgetFactors&, const BudgetFactors&) = default;
};

struct EvaluationReport {
  double total_cost = 0.0;
  std::vector<double> per_interval_curtailment;
  double aggregate_curtailment = 0.0;
  std::vector<double> per_node_curtailment;
  std::vector<Ratio> target_violation_factors;
  Ratio cap_violation_factor;
  std::optional<std::vector<BudgetFactors>> budget_violation_factors;

  /// Smallest defined per-interval factor (intervals with a zero target are
  /// trivially satisfied and skipped); nullopt when none is defined.
  Ratio worst_target_factor() const;
  /// Largest defined achieved/B_b ratio.
  Ratio worst_budget_upper_factor() const;
  /// Smallest defined achieved/(alpha_b B_b) ratio.
  Ratio worst_budget_lower_factor() const;
};

/// Throws std::out_of_range when the schedule does not fit the instance.
EvaluationReport evaluate(const CurtailmentInstance& instance, const Schedule& schedule);

/// Intervals [first, last) of the instance as a standalone instance. The
/// aggregate cap and budgets are carried over unchanged.
CurtailmentInstance slice_intervals(const CurtailmentInstance& instance, int first, int last);

}  // namespace nlb
