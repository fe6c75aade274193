#include "nlb/exact_oracle.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace nlb {

std::uint64_t assignment_count(const CurtailmentInstance& instance) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  const auto radix = static_cast<std::uint64_t>(instance.num_strategies);
  for (int k = 0; k < instance.num_nodes * instance.num_intervals; ++k) {
    if (count > limit / radix) return limit;
    count *= radix;
  }
  return count;
}

std::optional<ExactSolution> brute_force(const CurtailmentInstance& instance, Problem problem,
                                         const BruteForceOptions& options) {
  require_valid(instance, options.tolerance);
  if (problem == Problem::Fair && !instance.budgets)
    throw std::invalid_argument("fair brute force needs node budgets");
  const std::uint64_t count = assignment_count(instance);
  if (count > options.enumeration_cap)
    throw OracleTooLarge("brute force would enumerate " + std::to_string(count) + " assignments");

  const int T = instance.num_intervals;
  const int M = instance.num_nodes;
  const int N = instance.num_strategies;
  const int digits = T * M;
  const double tol = options.tolerance;

  std::vector<int> digit(digits, 0);
  std::optional<ExactSolution> best;
  std::vector<double> interval(T);
  std::vector<double> node(M);

  for (std::uint64_t n = 0; n < count; ++n) {
    if (n > 0) {
      for (int k = digits - 1; k >= 0; --k) {
        if (++digit[k] < N) break;
        digit[k] = 0;
      }
    }
    double cost = 0.0;
    std::fill(interval.begin(), interval.end(), 0.0);
    std::fill(node.begin(), node.end(), 0.0);
    for (int t = 0; t < T; ++t)
      for (int b = 0; b < M; ++b) {
        const int j = digit[t * M + b];
        cost += instance.cost[t][b][j];
        interval[t] += instance.curtailment[t][b][j];
        node[b] += instance.curtailment[t][b][j];
      }
    if (best && !(cost < best->cost)) continue;

    bool feasible = true;
    double aggregate = 0.0;
    for (int t = 0; t < T && feasible; ++t) {
      aggregate += interval[t];
      feasible = interval[t] >= instance.interval_targets[t] - tol;
    }
    feasible = feasible && aggregate <= instance.aggregate_cap + tol;
    if (feasible && problem == Problem::Fair) {
      for (int b = 0; b < M && feasible; ++b) {
        const auto& budget = (*instance.budgets)[b];
        feasible = node[b] >= budget.lower_budget() - tol && node[b] <= budget.upper_budget + tol;
      }
    }
    if (!feasible) continue;

    ExactSolution solution;
    solution.cost = cost;
    solution.schedule = Schedule::all_default(T, M);
    for (int t = 0; t < T; ++t)
      for (int b = 0; b < M; ++b) solution.schedule.assignment[t][b] = digit[t * M + b];
    best = std::move(solution);
  }
  return best;
}

namespace {

std::int64_t as_integer(double value, const char* what) {
  const double rounded = std::round(value);
  if (std::abs(value - rounded) > 1e-9) throw std::invalid_argument(std::string("exact_dp needs integer ") + what);
  return static_cast<std::int64_t>(rounded);
}

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

}  // namespace

std::optional<ExactSolution> exact_dp(const CurtailmentInstance& instance, std::int64_t table_cap) {
  require_valid(instance);
  const int T = instance.num_intervals;
  const int M = instance.num_nodes;
  const int N = instance.num_strategies;
  const std::int64_t cap = as_integer(instance.aggregate_cap, "cap");
  if (cap > table_cap) throw OracleTooLarge("exact_dp cap " + std::to_string(cap) + " exceeds the table limit");
  const auto width = static_cast<std::size_t>(cap + 1);

  // per_interval[t][b][g]: cheapest cost for nodes 0..b to sum to exactly g.
  std::vector<std::vector<std::vector<double>>> best(T, std::vector<std::vector<double>>(M));
  std::vector<std::vector<std::vector<int>>> pick(T, std::vector<std::vector<int>>(M));
  for (int t = 0; t < T; ++t) {
    for (int b = 0; b < M; ++b) {
      auto& row = best[t][b];
      auto& row_pick = pick[t][b];
      row.assign(width, kUnreachable);
      row_pick.assign(width, -1);
      for (int j = 0; j < N; ++j) {
        const std::int64_t units = as_integer(instance.curtailment[t][b][j], "curtailments");
        const double c = instance.cost[t][b][j];
        for (std::int64_t g = units; g <= cap; ++g) {
          const double base = b == 0 ? (g == units ? 0.0 : kUnreachable) : best[t][b - 1][g - units];
          if (base == kUnreachable) continue;
          if (base + c < row[g]) {
            row[g] = base + c;
            row_pick[g] = j;
          }
        }
      }
    }
  }

  // horizon[t][g]: cheapest cost for intervals 0..t summing to exactly g with
  // every interval at or above its target.
  std::vector<std::vector<double>> horizon(T, std::vector<double>(width, kUnreachable));
  std::vector<std::vector<std::int64_t>> take(T, std::vector<std::int64_t>(width, -1));
  for (int t = 0; t < T; ++t) {
    const std::int64_t target = static_cast<std::int64_t>(std::ceil(instance.interval_targets[t] - 1e-9));
    const auto& interval = best[t][M - 1];
    std::vector<std::int64_t> reachable;
    for (std::int64_t u = std::max<std::int64_t>(target, 0); u <= cap; ++u)
      if (interval[u] != kUnreachable) reachable.push_back(u);
    for (std::int64_t g = 0; g <= cap; ++g) {
      for (std::int64_t u : reachable) {
        if (u > g) break;
        const double base = t == 0 ? (u == g ? 0.0 : kUnreachable) : horizon[t - 1][g - u];
        if (base == kUnreachable) continue;
        if (base + interval[u] < horizon[t][g]) {
          horizon[t][g] = base + interval[u];
          take[t][g] = u;
        }
      }
    }
  }

  std::int64_t total = -1;
  for (std::int64_t g = 0; g <= cap; ++g)
    if (horizon[T - 1][g] != kUnreachable && (total < 0 || horizon[T - 1][g] < horizon[T - 1][total])) total = g;
  if (total < 0) return std::nullopt;

  ExactSolution solution;
  solution.schedule = Schedule::all_default(T, M);
  std::int64_t g = total;
  for (int t = T - 1; t >= 0; --t) {
    std::int64_t units = take[t][g];
    g -= units;
    for (int b = M - 1; b >= 0; --b) {
      const int j = pick[t][b][units];
      solution.schedule.assignment[t][b] = j;
      units -= as_integer(instance.curtailment[t][b][j], "curtailments");
    }
  }
  solution.cost = evaluate(instance, solution.schedule).total_cost;
  return solution;
}

}  // namespace nlb
