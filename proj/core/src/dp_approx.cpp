#include "nlb/dp_approx.hpp"

#include <cmath>
#include <sstream>

namespace nlb {

std::int64_t round_up_units(double value, double mu) {
  if (value <= 0.0) return 0;
  const double quotient = value / mu;
  const double nearest = std::round(quotient);
  if (std::abs(quotient - nearest) <= 1e-12 * std::max(1.0, nearest))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(quotient));
}

namespace {

std::int64_t round_down_units(double value, double mu) {
  if (value <= 0.0) return 0;
  const double quotient = value / mu;
  const double nearest = std::round(quotient);
  if (std::abs(quotient - nearest) <= 1e-12 * std::max(1.0, nearest))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(quotient));
}

ScaledInstance round_with(const CurtailmentInstance& instance, double mu) {
  ScaledInstance scaled;
  scaled.mu = mu;
  scaled.rounded_curtailment.resize(instance.num_intervals);
  for (int t = 0; t < instance.num_intervals; ++t) {
    auto& per_node = scaled.rounded_curtailment[t];
    per_node.resize(instance.num_nodes);
    for (int b = 0; b < instance.num_nodes; ++b) {
      per_node[b].resize(instance.num_strategies);
      for (int j = 0; j < instance.num_strategies; ++j)
        per_node[b][j] = round_up_units(instance.curtailment[t][b][j], mu);
    }
  }
  for (double target : instance.interval_targets) scaled.rounded_targets.push_back(round_up_units(target, mu));
  scaled.rounded_cap = round_up_units(instance.aggregate_cap, mu);
  return scaled;
}

bool is_integer(double value, double tolerance) { return std::abs(value - std::round(value)) <= tolerance; }

}  // namespace

ScaledInstance scale_instance(const CurtailmentInstance& instance, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    std::ostringstream out;
    out << "epsilon must lie in (0, 1], got " << epsilon;
    throw ScalingError(ScalingError::Kind::EpsilonOutOfRange, out.str());
  }
  const double min_target = instance.min_target();
  if (!(min_target > 0.0))
    throw ScalingError(ScalingError::Kind::ZeroTarget, "every interval target must be positive to scale");

  const double mu = epsilon * min_target / instance.num_nodes;
  ScaledInstance scaled = round_with(instance, mu);
  scaled.epsilon = epsilon;
  scaled.search_cap = round_down_units((1.0 + epsilon) * instance.aggregate_cap, mu);
  return scaled;
}

ScaledInstance unit_scale(const CurtailmentInstance& instance, double tolerance) {
  for (const auto& per_node : instance.curtailment)
    for (const auto& row : per_node)
      for (double gamma : row)
        if (!is_integer(gamma, tolerance))
          throw ScalingError(ScalingError::Kind::NonIntegral, "unit scaling needs integer curtailments");
  for (double target : instance.interval_targets)
    if (!is_integer(target, tolerance))
      throw ScalingError(ScalingError::Kind::NonIntegral, "unit scaling needs integer targets");
  if (!is_integer(instance.aggregate_cap, tolerance))
    throw ScalingError(ScalingError::Kind::NonIntegral, "unit scaling needs an integer cap");

  ScaledInstance scaled = round_with(instance, 1.0);
  scaled.epsilon = 0.0;
  scaled.search_cap = scaled.rounded_cap;
  return scaled;
}

// --- Theta ------------------------------------------------------------------

ThetaTable::ThetaTable(std::vector<NodeOptions> nodes, std::int64_t max_units)
    : nodes_(std::move(nodes)), max_units_(max_units) {
  if (nodes_.empty()) throw std::invalid_argument("ThetaTable needs at least one node");
  if (max_units_ < 0) throw std::invalid_argument("ThetaTable needs a non-negative unit range");
  const std::size_t size = nodes_.size() * static_cast<std::size_t>(max_units_ + 1);
  cost_.assign(size, kInfeasibleCost);
  choice_.assign(size, -1);

  // b = 1: exact hits only.
  const auto& first = nodes_.front();
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto& option = first[k];
    if (option.units > max_units_) continue;
    const std::size_t at = index(option.units, 1);
    if (option.cost < cost_[at]) {
      cost_[at] = option.cost;
      choice_[at] = static_cast<std::int32_t>(k);
    }
  }

  for (int b = 2; b <= num_nodes(); ++b) {
    const auto& options = nodes_[b - 1];
    const double* prev = &cost_[index(0, b - 1)];
    double* curr = &cost_[index(0, b)];
    std::int32_t* pick = &choice_[index(0, b)];
    for (std::int64_t g = 0; g <= max_units_; ++g) {
      double best = kInfeasibleCost;
      std::int32_t best_k = -1;
      for (std::size_t k = 0; k < options.size(); ++k) {
        const auto& option = options[k];
        if (option.units > g) continue;
        const double base = prev[g - option.units];
        if (base == kInfeasibleCost) continue;
        const double candidate = base + option.cost;
        if (candidate < best) {
          best = candidate;
          best_k = static_cast<std::int32_t>(k);
        }
      }
      curr[g] = best;
      pick[g] = best_k;
    }
  }
}

double ThetaTable::cost(std::int64_t units, int b) const {
  if (units < 0 || units > max_units_ || b < 1 || b > num_nodes()) return kInfeasibleCost;
  return cost_[index(units, b)];
}

int ThetaTable::choice(std::int64_t units, int b) const {
  if (units < 0 || units > max_units_ || b < 1 || b > num_nodes()) return -1;
  return choice_[index(units, b)];
}

ThetaTable build_theta_table(std::vector<NodeOptions> nodes, std::int64_t max_units) {
  return ThetaTable(std::move(nodes), max_units);
}

ThetaTable build_theta(const ScaledInstance& scaled, const CurtailmentInstance& instance, int t) {
  std::vector<NodeOptions> nodes(instance.num_nodes);
  for (int b = 0; b < instance.num_nodes; ++b) {
    auto& options = nodes[b];
    options.reserve(instance.num_strategies);
    for (int j = 0; j < instance.num_strategies; ++j)
      options.push_back({scaled.rounded_curtailment[t][b][j], instance.cost[t][b][j], j});
  }
  return ThetaTable(std::move(nodes), scaled.search_cap);
}

namespace {

void check_entry(const ThetaTable& theta, std::int64_t units, double cost) {
  const double stored = theta.cost(units, theta.num_nodes());
  if (stored == kInfeasibleCost || std::abs(stored - cost) > 1e-9 * std::max(1.0, std::abs(cost))) {
    std::ostringstream out;
    out << "(" << cost << ", " << units << ") is not a finite Theta entry (table holds " << stored << ")";
    throw InconsistentTable(out.str());
  }
}

}  // namespace

std::vector<int> reconstruct_interval(const ThetaTable& theta, std::int64_t units, double cost) {
  check_entry(theta, units, cost);
  std::vector<int> strategies(theta.num_nodes(), 0);
  std::int64_t remaining = units;
  for (int b = theta.num_nodes(); b >= 1; --b) {
    const int k = theta.choice(remaining, b);
    if (k < 0) throw InconsistentTable("missing back-pointer while reconstructing an interval");
    const auto& option = theta.options(b)[k];
    strategies[b - 1] = option.strategy;
    remaining -= option.units;
  }
  if (remaining != 0) throw InconsistentTable("reconstruction did not consume every unit");
  return strategies;
}

std::vector<int> reconstruct_interval_by_argmin(const ThetaTable& theta, std::int64_t units, double cost) {
  check_entry(theta, units, cost);
  std::vector<int> strategies(theta.num_nodes(), 0);
  std::int64_t remaining = units;
  for (int b = theta.num_nodes(); b >= 1; --b) {
    const auto& options = theta.options(b);
    int best_k = -1;
    double best = kInfeasibleCost;
    for (std::size_t k = 0; k < options.size(); ++k) {
      const auto& option = options[k];
      double candidate;
      if (b == 1) {
        candidate = option.units == remaining ? option.cost : kInfeasibleCost;
      } else {
        const double base = theta.cost(remaining - option.units, b - 1);
        candidate = base == kInfeasibleCost ? kInfeasibleCost : base + option.cost;
      }
      if (candidate < best) {
        best = candidate;
        best_k = static_cast<int>(k);
      }
    }
    if (best_k < 0) throw InconsistentTable("no strategy reproduces the table entry");
    strategies[b - 1] = options[best_k].strategy;
    remaining -= options[best_k].units;
  }
  if (remaining != 0) throw InconsistentTable("reconstruction did not consume every unit");
  return strategies;
}

std::vector<IntervalChoice> candidate_set(const ThetaTable& theta, std::int64_t min_units) {
  std::vector<IntervalChoice> set;
  const int M = theta.num_nodes();
  for (std::int64_t g = std::max<std::int64_t>(min_units, 0); g <= theta.max_units(); ++g) {
    const double c = theta.cost(g, M);
    if (c != kInfeasibleCost) set.push_back({c, g});
  }
  return set;
}

// --- Phi --------------------------------------------------------------------

PhiTable::PhiTable(const std::vector<std::vector<IntervalChoice>>& candidates, std::int64_t max_units)
    : num_intervals_(static_cast<int>(candidates.size())), max_units_(max_units), candidates_(candidates) {
  if (num_intervals_ == 0) throw std::invalid_argument("PhiTable needs at least one interval");
  if (max_units_ < 0) throw std::invalid_argument("PhiTable needs a non-negative unit range");
  const std::size_t size = static_cast<std::size_t>(num_intervals_) * static_cast<std::size_t>(max_units_ + 1);
  cost_.assign(size, kInfeasibleCost);
  pick_.assign(size, -1);

  for (const auto& choice : candidates_[0]) {
    if (choice.units > max_units_) continue;
    const std::size_t at = index(choice.units, 1);
    if (choice.cost < cost_[at]) {
      cost_[at] = choice.cost;
      pick_[at] = choice.units;
    }
  }

  for (int t = 2; t <= num_intervals_; ++t) {
    const auto& set = candidates_[t - 1];
    const double* prev = &cost_[index(0, t - 1)];
    double* curr = &cost_[index(0, t)];
    std::int64_t* pick = &pick_[index(0, t)];
    for (std::int64_t g = 0; g <= max_units_; ++g) {
      double best = kInfeasibleCost;
      std::int64_t best_units = -1;
      for (const auto& choice : set) {
        if (choice.units > g) break;  // ascending units
        const double base = prev[g - choice.units];
        if (base == kInfeasibleCost) continue;
        const double candidate = base + choice.cost;
        if (candidate < best) {
          best = candidate;
          best_units = choice.units;
        }
      }
      curr[g] = best;
      pick[g] = best_units;
    }
  }
}

double PhiTable::cost(std::int64_t units, int t) const {
  if (units < 0 || units > max_units_ || t < 1 || t > num_intervals_) return kInfeasibleCost;
  return cost_[index(units, t)];
}

std::int64_t PhiTable::chosen_units(std::int64_t units, int t) const {
  if (units < 0 || units > max_units_ || t < 1 || t > num_intervals_) return -1;
  return pick_[index(units, t)];
}

std::optional<std::int64_t> PhiTable::best_total(std::int64_t limit) const {
  std::optional<std::int64_t> best;
  double best_cost = kInfeasibleCost;
  for (std::int64_t g = 0; g <= std::min(limit, max_units_); ++g) {
    const double c = cost(g, num_intervals_);
    if (c < best_cost) {
      best_cost = c;
      best = g;
    }
  }
  return best;
}

std::vector<IntervalChoice> PhiTable::trace(std::int64_t units) const {
  std::vector<IntervalChoice> picks(num_intervals_);
  std::int64_t remaining = units;
  for (int t = num_intervals_; t >= 1; --t) {
    const std::int64_t taken = chosen_units(remaining, t);
    if (taken < 0) throw InconsistentTable("missing back-pointer in Phi");
    const auto& set = candidates_[t - 1];
    auto it = std::lower_bound(set.begin(), set.end(), taken,
                               [](const IntervalChoice& c, std::int64_t u) { return c.units < u; });
    if (it == set.end() || it->units != taken) throw InconsistentTable("Phi pick is not in the candidate set");
    picks[t - 1] = *it;
    remaining -= taken;
  }
  if (remaining != 0) throw InconsistentTable("Phi trace did not consume every unit");
  return picks;
}

// --- driver -----------------------------------------------------------------

std::optional<DpSolution> solve_scaled(const CurtailmentInstance& instance, const ScaledInstance& scaled) {
  const int T = instance.num_intervals;
  std::vector<ThetaTable> thetas;
  thetas.reserve(T);
  std::vector<std::vector<IntervalChoice>> candidates;
  candidates.reserve(T);
  for (int t = 0; t < T; ++t) {
    thetas.push_back(build_theta(scaled, instance, t));
    candidates.push_back(candidate_set(thetas.back(), scaled.rounded_targets[t]));
    if (candidates.back().empty()) return std::nullopt;
  }

  const PhiTable phi(candidates, scaled.search_cap);
  const auto total = phi.best_total(scaled.search_cap);
  if (!total) return std::nullopt;

  DpSolution solution;
  solution.total_units = *total;
  solution.trace = phi.trace(*total);
  solution.schedule.assignment.resize(T);
  for (int t = 0; t < T; ++t) {
    const auto& pick = solution.trace[t];
    solution.schedule.assignment[t] = reconstruct_interval(thetas[t], pick.units, pick.cost);
  }
  solution.cost = evaluate(instance, solution.schedule).total_cost;
  return solution;
}

std::optional<DpSolution> solve_mcnlb(const CurtailmentInstance& instance, double epsilon) {
  require_valid(instance);
  return solve_scaled(instance, scale_instance(instance, epsilon));
}

}  // namespace nlb
