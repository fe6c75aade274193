#include "nlb/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlb {

double CurtailmentInstance::target_total() const {
  double total = 0.0;
  for (double target : interval_targets) total += target;
  return total;
}

double CurtailmentInstance::min_target() const {
  if (interval_targets.empty()) return 0.0;
  return *std::min_element(interval_targets.begin(), interval_targets.end());
}

Schedule Schedule::all_default(int num_intervals, int num_nodes) {
  return Schedule{std::vector<std::vector<int>>(num_intervals, std::vector<int>(num_nodes, 0))};
}

const char* to_string(ValidationErrorKind kind) {
  switch (kind) {
    case ValidationErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ValidationErrorKind::MissingDefaultStrategy: return "MissingDefaultStrategy";
    case ValidationErrorKind::TargetsExceedCap: return "TargetsExceedCap";
    case ValidationErrorKind::NegativeValue: return "NegativeValue";
    case ValidationErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ValidationErrorKind::InvalidBudget: return "InvalidBudget";
  }
  return "Unknown";
}

namespace {

std::string summarize(const std::vector<ValidationIssue>& issues) {
  std::ostringstream out;
  out << "invalid instance (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
  for (const auto& issue : issues) out << "; " << to_string(issue.kind) << ": " << issue.detail;
  return out.str();
}

bool tensor_has_shape(const Tensor3& tensor, int intervals, int nodes, int strategies) {
  if (static_cast<int>(tensor.size()) != intervals) return false;
  for (const auto& per_node : tensor) {
    if (static_cast<int>(per_node.size()) != nodes) return false;
    for (const auto& row : per_node)
      if (static_cast<int>(row.size()) != strategies) return false;
  }
  return true;
}

std::string where(int t, int b, int j) {
  std::ostringstream out;
  out << "[t=" << t << "][b=" << b << "][j=" << j << "]";
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

std::vector<ValidationIssue> validate(const CurtailmentInstance& instance, double tolerance) {
  std::vector<ValidationIssue> issues;
  auto report = [&](ValidationErrorKind kind, std::string detail) {
    issues.push_back({kind, std::move(detail)});
  };

  const int T = instance.num_intervals;
  const int M = instance.num_nodes;
  const int N = instance.num_strategies;

  bool shape_ok = true;
  if (T <= 0 || M <= 0 || N <= 0) {
    report(ValidationErrorKind::ShapeMismatch, "num_intervals, num_nodes and num_strategies must be positive");
    shape_ok = false;
  }
  if (shape_ok && !tensor_has_shape(instance.curtailment, T, M, N)) {
    report(ValidationErrorKind::ShapeMismatch, "curtailment is not shaped num_intervals x num_nodes x num_strategies");
    shape_ok = false;
  }
  if (shape_ok && !tensor_has_shape(instance.cost, T, M, N)) {
    report(ValidationErrorKind::ShapeMismatch, "cost is not shaped num_intervals x num_nodes x num_strategies");
    shape_ok = false;
  }
  const bool targets_ok = T > 0 && static_cast<int>(instance.interval_targets.size()) == T;
  if (!targets_ok) {
    report(ValidationErrorKind::ShapeMismatch, "interval_targets must hold one value per interval");
  }
  if (instance.budgets && static_cast<int>(instance.budgets->size()) != M) {
    report(ValidationErrorKind::ShapeMismatch, "budgets must hold one entry per node");
  }

  if (shape_ok) {
    for (int t = 0; t < T; ++t) {
      for (int b = 0; b < M; ++b) {
        bool has_default = false;
        for (int j = 0; j < N; ++j) {
          const double gamma = instance.curtailment[t][b][j];
          const double c = instance.cost[t][b][j];
          if (!std::isfinite(gamma) || !std::isfinite(c)) {
            report(ValidationErrorKind::NonFiniteValue, "non-finite curtailment or cost at " + where(t, b, j));
            continue;
          }
          if (gamma < 0.0) report(ValidationErrorKind::NegativeValue, "negative curtailment at " + where(t, b, j));
          if (c < 0.0) report(ValidationErrorKind::NegativeValue, "negative cost at " + where(t, b, j));
          if (gamma == 0.0 && c == 0.0) has_default = true;
        }
        if (!has_default) {
          std::ostringstream out;
          out << "no zero-curtailment zero-cost strategy at [t=" << t << "][b=" << b << "]";
          report(ValidationErrorKind::MissingDefaultStrategy, out.str());
        }
      }
    }
  }

  if (targets_ok) {
    bool targets_finite = true;
    for (int t = 0; t < T; ++t) {
      const double target = instance.interval_targets[t];
      if (!std::isfinite(target)) {
        report(ValidationErrorKind::NonFiniteValue, "non-finite target at t=" + std::to_string(t));
        targets_finite = false;
      } else if (target < 0.0) {
        report(ValidationErrorKind::NegativeValue, "negative target at t=" + std::to_string(t));
      }
    }
    if (!std::isfinite(instance.aggregate_cap)) {
      report(ValidationErrorKind::NonFiniteValue, "non-finite aggregate_cap");
    } else if (instance.aggregate_cap < 0.0) {
      report(ValidationErrorKind::NegativeValue, "negative aggregate_cap");
    } else if (targets_finite && instance.target_total() > instance.aggregate_cap + tolerance) {
      std::ostringstream out;
      out << "sum of interval targets " << instance.target_total() << " exceeds aggregate_cap "
          << instance.aggregate_cap;
      report(ValidationErrorKind::TargetsExceedCap, out.str());
    }
  }

  if (instance.budgets) {
    const auto& budgets = *instance.budgets;
    double floor_total = 0.0;
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      const auto& budget = budgets[b];
      if (!std::isfinite(budget.lower_fraction) || !std::isfinite(budget.upper_budget)) {
        report(ValidationErrorKind::NonFiniteValue, "non-finite budget for node " + std::to_string(b));
        continue;
      }
      if (budget.upper_budget < 0.0)
        report(ValidationErrorKind::NegativeValue, "negative upper budget for node " + std::to_string(b));
      if (budget.lower_fraction < 0.0 || budget.lower_fraction > 1.0)
        report(ValidationErrorKind::InvalidBudget, "lower_fraction outside [0,1] for node " + std::to_string(b));
      floor_total += budget.lower_budget();
    }
    if (std::isfinite(instance.aggregate_cap) && floor_total > instance.aggregate_cap + tolerance) {
      report(ValidationErrorKind::InvalidBudget, "sum of budget floors exceeds aggregate_cap");
    }
  }
  return issues;
}

const CurtailmentInstance& require_valid(const CurtailmentInstance& instance, double tolerance) {
  auto issues = validate(instance, tolerance);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return instance;
}

bool schedule_fits(const CurtailmentInstance& instance, const Schedule& schedule) {
  if (static_cast<int>(schedule.assignment.size()) != instance.num_intervals) return false;
  for (const auto& row : schedule.assignment) {
    if (static_cast<int>(row.size()) != instance.num_nodes) return false;
    for (int j : row)
      if (j < 0 || j >= instance.num_strategies) return false;
  }
  return true;
}

Ratio safe_ratio(double numerator, double denominator) {
  if (denominator == 0.0) return std::nullopt;
  return numerator / denominator;
}

namespace {

template <typename Pick>
Ratio fold_defined(const std::vector<Ratio>& ratios, Pick pick) {
  Ratio best;
  for (const auto& r : ratios) {
    if (!r) continue;
    best = best ? pick(*best, *r) : *r;
  }
  return best;
}

double min_of(double a, double b) { return std::min(a, b); }
double max_of(double a, double b) { return std::max(a, b); }

}  // namespace

Ratio EvaluationReport::worst_target_factor() const {
  return fold_defined(target_violation_factors, min_of);
}

Ratio EvaluationReport::worst_budget_upper_factor() const {
  if (!budget_violation_factors) return std::nullopt;
  std::vector<Ratio> upper;
  for (const auto& f : *budget_violation_factors) upper.push_back(f.upper);
  return fold_defined(upper, max_of);
}

Ratio EvaluationReport::worst_budget_lower_factor() const {
  if (!budget_violation_factors) return std::nullopt;
  std::vector<Ratio> lower;
  for (const auto& f : *budget_violation_factors) lower.push_back(f.lower);
  return fold_defined(lower, min_of);
}

EvaluationReport evaluate(const CurtailmentInstance& instance, const Schedule& schedule) {
  if (!schedule_fits(instance, schedule))
    throw std::out_of_range("schedule does not fit the instance (shape or strategy index out of range)");

  const int T = instance.num_intervals;
  const int M = instance.num_nodes;
  EvaluationReport report;
  report.per_interval_curtailment.assign(T, 0.0);
  report.per_node_curtailment.assign(M, 0.0);

  for (int t = 0; t < T; ++t) {
    for (int b = 0; b < M; ++b) {
      const int j = schedule.assignment[t][b];
      const double gamma = instance.curtailment[t][b][j];
      report.total_cost += instance.cost[t][b][j];
      report.per_interval_curtailment[t] += gamma;
      report.per_node_curtailment[b] += gamma;
    }
    report.aggregate_curtailment += report.per_interval_curtailment[t];
  }

  report.target_violation_factors.reserve(T);
  for (int t = 0; t < T; ++t)
    report.target_violation_factors.push_back(
        safe_ratio(report.per_interval_curtailment[t], instance.interval_targets[t]));
  report.cap_violation_factor = safe_ratio(report.aggregate_curtailment, instance.aggregate_cap);

  if (instance.budgets) {
    std::vector<BudgetFactors> factors;
    factors.reserve(M);
    for (int b = 0; b < M; ++b) {
      const auto& budget = (*instance.budgets)[b];
      factors.push_back({safe_ratio(report.per_node_curtailment[b], budget.lower_budget()),
                         safe_ratio(report.per_node_curtailment[b], budget.upper_budget)});
    }
    report.budget_violation_factors = std::move(factors);
  }
  return report;
}

CurtailmentInstance slice_intervals(const CurtailmentInstance& instance, int first, int last) {
  if (first < 0 || last > instance.num_intervals || first >= last)
    throw std::out_of_range("slice_intervals: empty or out-of-range interval range");
  CurtailmentInstance part = instance;
  part.num_intervals = last - first;
  part.curtailment.assign(instance.curtailment.begin() + first, instance.curtailment.begin() + last);
  part.cost.assign(instance.cost.begin() + first, instance.cost.begin() + last);
  part.interval_targets.assign(instance.interval_targets.begin() + first,
                               instance.interval_targets.begin() + last);
  return part;
}

}  // namespace nlb
