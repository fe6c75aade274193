#include "nlb/fair_rounding.hpp"

#include <algorithm>
#include <cmath>

namespace nlb {

const char* to_string(CostKind kind) {
  switch (kind) {
    case CostKind::Linear: return "linear";
    case CostKind::Quadratic: return "quadratic";
    case CostKind::Custom: return "custom";
  }
  return "custom";
}

namespace {

bool fits_power(const CurtailmentInstance& instance, int power, double tolerance) {
  std::optional<double> coefficient;
  for (int t = 0; t < instance.num_intervals; ++t)
    for (int b = 0; b < instance.num_nodes; ++b)
      for (int j = 0; j < instance.num_strategies; ++j) {
        const double gamma = instance.curtailment[t][b][j];
        const double c = instance.cost[t][b][j];
        if (gamma == 0.0) {
          if (c != 0.0) return false;
          continue;
        }
        const double a = c / std::pow(gamma, power);
        if (!coefficient) {
          coefficient = a;
        } else if (std::abs(a - *coefficient) > tolerance * std::max(1.0, std::abs(*coefficient))) {
          return false;
        }
      }
  return true;
}

}  // namespace

CostKind detect_cost_kind(const CurtailmentInstance& instance, double relative_tolerance) {
  if (fits_power(instance, 1, relative_tolerance)) return CostKind::Linear;
  if (fits_power(instance, 2, relative_tolerance)) return CostKind::Quadratic;
  return CostKind::Custom;
}

FairnessConfig fairness_config(const CurtailmentInstance& instance) {
  if (!instance.budgets) throw MissingBudgets();
  return {*instance.budgets, detect_cost_kind(instance)};
}

LinearProgram build_fair_relaxation(const CurtailmentInstance& instance) {
  if (!instance.budgets) throw MissingBudgets();
  const int T = instance.num_intervals;
  const int M = instance.num_nodes;
  const int N = instance.num_strategies;

  LinearProgram lp;
  lp.objective.reserve(static_cast<std::size_t>(T) * M * N);
  for (int t = 0; t < T; ++t)
    for (int b = 0; b < M; ++b)
      for (int j = 0; j < N; ++j) {
        lp.objective.push_back(instance.cost[t][b][j]);
        lp.lower.push_back(0.0);
        lp.upper.push_back(1.0);
        lp.variable_names.push_back("x" + std::to_string(relaxation_variable(instance, t, b, j)));
      }

  const std::size_t width = lp.objective.size();
  auto add = [&](std::vector<double> row, RowSense sense, double rhs, std::string name) {
    lp.rows.push_back(std::move(row));
    lp.senses.push_back(sense);
    lp.rhs.push_back(rhs);
    lp.row_names.push_back(std::move(name));
  };

  for (int t = 0; t < T; ++t) {
    std::vector<double> row(width, 0.0);
    for (int b = 0; b < M; ++b)
      for (int j = 0; j < N; ++j) row[relaxation_variable(instance, t, b, j)] = instance.curtailment[t][b][j];
    add(std::move(row), RowSense::GreaterEqual, instance.interval_targets[t], "TGT" + std::to_string(t));
  }
  {
    std::vector<double> row(width, 0.0);
    for (int t = 0; t < T; ++t)
      for (int b = 0; b < M; ++b)
        for (int j = 0; j < N; ++j) row[relaxation_variable(instance, t, b, j)] = instance.curtailment[t][b][j];
    add(std::move(row), RowSense::LessEqual, instance.aggregate_cap, "CAP");
  }
  for (int b = 0; b < M; ++b) {
    std::vector<double> row(width, 0.0);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < N; ++j) row[relaxation_variable(instance, t, b, j)] = instance.curtailment[t][b][j];
    const auto& budget = (*instance.budgets)[b];
    add(row, RowSense::GreaterEqual, budget.lower_budget(), "BLO" + std::to_string(b));
    add(std::move(row), RowSense::LessEqual, budget.upper_budget, "BHI" + std::to_string(b));
  }
  for (int t = 0; t < T; ++t)
    for (int b = 0; b < M; ++b) {
      std::vector<double> row(width, 0.0);
      for (int j = 0; j < N; ++j) row[relaxation_variable(instance, t, b, j)] = 1.0;
      add(std::move(row), RowSense::Equal, 1.0, "ONE" + std::to_string(t * M + b));
    }
  return lp;
}

std::vector<StrategyLevel> sorted_levels(const CurtailmentInstance& instance, int t, int b) {
  std::vector<StrategyLevel> levels;
  levels.reserve(instance.num_strategies);
  for (int j = 0; j < instance.num_strategies; ++j)
    levels.push_back({instance.curtailment[t][b][j], instance.cost[t][b][j], j});
  std::stable_sort(levels.begin(), levels.end(), [](const StrategyLevel& a, const StrategyLevel& b) {
    if (a.curtailment != b.curtailment) return a.curtailment < b.curtailment;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.strategy < b.strategy;
  });
  auto last = std::unique(levels.begin(), levels.end(),
                          [](const StrategyLevel& a, const StrategyLevel& b) { return a.curtailment == b.curtailment; });
  levels.erase(last, levels.end());
  return levels;
}

int round_to_level(const std::vector<StrategyLevel>& levels, double expected, double tolerance) {
  if (levels.empty()) throw std::invalid_argument("round_to_level: no strategies");
  // Largest level not above the expected value.
  std::size_t lower = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (std::abs(levels[i].curtailment - expected) <= tolerance) return static_cast<int>(i);
    if (levels[i].curtailment <= expected) lower = i;
  }
  if (lower + 1 >= levels.size()) return static_cast<int>(lower);
  if (expected < levels[lower].curtailment) return static_cast<int>(lower);
  const double below = expected - levels[lower].curtailment;
  const double above = levels[lower + 1].curtailment - expected;
  return static_cast<int>(below >= above ? lower + 1 : lower);
}

Schedule round_fair_solution(const CurtailmentInstance& instance, const LpSolution& fractional,
                             RoundingDiagnostics* diagnostics) {
  if (fractional.status != LpStatus::Optimal)
    throw std::invalid_argument("round_fair_solution needs an optimal LP solution");
  const int T = instance.num_intervals;
  const int M = instance.num_nodes;
  const int N = instance.num_strategies;
  if (static_cast<int>(fractional.values.size()) != T * M * N)
    throw std::invalid_argument("LP solution does not match the instance");

  RoundingDiagnostics local;
  local.expected_curtailment.assign(T, std::vector<double>(M, 0.0));
  Schedule schedule = Schedule::all_default(T, M);

  for (int t = 0; t < T; ++t) {
    for (int b = 0; b < M; ++b) {
      double expected = 0.0;
      for (int j = 0; j < N; ++j)
        expected += instance.curtailment[t][b][j] * fractional.values[relaxation_variable(instance, t, b, j)];
      local.expected_curtailment[t][b] = expected;

      const auto levels = sorted_levels(instance, t, b);
      for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        if (levels[i].curtailment <= 0.0) continue;
        const double k = (levels[i + 1].curtailment / levels[i].curtailment + 1.0) / 2.0;
        local.spacing_k = std::max(local.spacing_k, k);
      }
      const int level = round_to_level(levels, expected);
      schedule.assignment[t][b] = levels[level].strategy;
      if (levels[level].curtailment == 0.0 && expected > kDefaultTolerance) local.rounded_to_zero = true;
    }
  }
  if (diagnostics) *diagnostics = std::move(local);
  return schedule;
}

std::optional<FairSolution> solve_fair(const CurtailmentInstance& instance, const SimplexOptions& options) {
  require_valid(instance);
  const auto lp = build_fair_relaxation(instance);
  const auto fractional = solve_lp(lp, options);
  if (fractional.status != LpStatus::Optimal) return std::nullopt;

  FairSolution solution;
  solution.lp_optimum = fractional.objective;
  solution.schedule = round_fair_solution(instance, fractional, &solution.diagnostics);
  solution.report = evaluate(instance, solution.schedule);
  solution.cost_kind = detect_cost_kind(instance);
  solution.cost_ratio = safe_ratio(solution.report.total_cost, solution.lp_optimum);
  solution.lower_guarantee_applies = !solution.diagnostics.rounded_to_zero;
  return solution;
}

}  // namespace nlb
