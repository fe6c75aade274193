#include "nlb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>

namespace nlb {

const char* to_string(ScenarioMode mode) {
  switch (mode) {
    case ScenarioMode::LoadCurtailment: return "load";
    case ScenarioMode::SolarCurtailment: return "solar";
    case ScenarioMode::Mixed: return "mixed";
  }
  return "load";
}

ScenarioMode scenario_mode_from_string(const std::string& text) {
  if (text == "load") return ScenarioMode::LoadCurtailment;
  if (text == "solar") return ScenarioMode::SolarCurtailment;
  if (text == "mixed") return ScenarioMode::Mixed;
  throw std::invalid_argument("unknown scenario mode '" + text + "' (expected load, solar or mixed)");
}

void ScenarioSpec::check() const {
  if (nodes <= 0 || intervals <= 0) throw std::invalid_argument("scenario needs positive node and interval counts");
  if (!(target_low >= 0.0) || !(target_high >= target_low))
    throw std::invalid_argument("scenario target range needs 0 <= L <= U");
  if (!(pv.area_min_m2 > 0.0) || pv.area_max_m2 < pv.area_min_m2 || !(pv.yield_min >= 0.0) ||
      pv.yield_max < pv.yield_min || pv.yield_max > 1.0)
    throw std::invalid_argument("scenario PV ranges are inconsistent");
  if (paper_replication &&
      (pv.area_min_m2 < 10.0 || pv.area_max_m2 > 20.0 || pv.yield_min < 0.05 || pv.yield_max > 0.15))
    throw std::invalid_argument("replication mode keeps PV area within 10-20 m^2 and yield within 5-15%");
  if (!(load_min_kwh > 0.0) || load_max_kwh < load_min_kwh)
    throw std::invalid_argument("scenario load range needs 0 < min <= max");
  if (!(capacity_factor > 0.0)) throw std::invalid_argument("scenario capacity factor must be positive");
  if (!(cost_coefficient >= 0.0)) throw std::invalid_argument("scenario cost coefficient must be non-negative");
  if (cost_kind == CostKind::Custom) throw std::invalid_argument("scenario cost kind must be linear or quadratic");
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) throw std::invalid_argument("scenario alpha must lie in [0, 1]");
  if (start_hour < 0) throw std::invalid_argument("scenario start hour must be non-negative");
}

std::vector<double> solar_strategy_values(double output_kwh) {
  return {0.0, 0.125 * output_kwh, 0.25 * output_kwh, 0.5 * output_kwh, 0.75 * output_kwh, output_kwh};
}

double pv_hourly_output_kwh(double radiance_wm2, double area_m2, double yield) {
  return radiance_wm2 * area_m2 * yield / 1000.0;
}

std::vector<double> clear_sky_trace() {
  std::vector<double> trace(24, 0.0);
  for (int h = 6; h <= 18; ++h) trace[h] = std::max(0.0, 1000.0 * std::sin(std::numbers::pi * (h - 6) / 12.0));
  return trace;
}

std::vector<double> read_radiance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("radiance CSV is empty");
  line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
  if (line != "hour,wm2") throw std::invalid_argument("radiance CSV header must be 'hour,wm2'");

  std::vector<std::pair<int, double>> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int hour = 0;
    char comma = 0;
    double value = 0.0;
    if (!(fields >> hour >> comma >> value) || comma != ',' || hour < 0 || value < 0.0)
      throw std::invalid_argument("radiance CSV line " + std::to_string(line_number) + " is malformed");
    rows.push_back({hour, value});
  }
  std::sort(rows.begin(), rows.end());
  std::vector<double> trace;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<int>(i))
      throw std::invalid_argument("radiance CSV hours must run 0, 1, 2, ... without gaps");
    trace.push_back(rows[i].second);
  }
  return trace;
}

namespace {

// Platform-independent draws on top of mt19937_64.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

double cost_of(const ScenarioSpec& spec, double gamma) {
  return spec.cost_kind == CostKind::Linear ? spec.cost_coefficient * gamma : spec.cost_coefficient * gamma * gamma;
}

CurtailmentInstance empty_instance(const ScenarioSpec& spec) {
  CurtailmentInstance instance;
  instance.num_nodes = spec.nodes;
  instance.num_strategies = kSolarStrategies;
  instance.num_intervals = spec.intervals;
  instance.curtailment.assign(spec.intervals,
                              std::vector<std::vector<double>>(spec.nodes, std::vector<double>(kSolarStrategies, 0.0)));
  instance.cost = instance.curtailment;
  instance.aggregate_cap = spec.target_high;
  return instance;
}

// Targets summing to L with weights drawn from [0.75, 1.25].
std::vector<double> draw_targets(const ScenarioSpec& spec, Sampler& sampler) {
  std::vector<double> weights(spec.intervals);
  double total = 0.0;
  for (auto& w : weights) {
    w = sampler.uniform(0.75, 1.25);
    total += w;
  }
  std::vector<double> targets(spec.intervals);
  for (int t = 0; t < spec.intervals; ++t) targets[t] = spec.target_low * weights[t] / total;
  return targets;
}

struct PvNode {
  double area = 0.0;
  double yield = 0.0;
};

const std::vector<double>& trace_for(const ScenarioSpec& spec, std::vector<double>& storage) {
  if (!spec.radiance_wm2.empty()) return spec.radiance_wm2;
  storage = clear_sky_trace();
  return storage;
}

void fill_costs(const ScenarioSpec& spec, CurtailmentInstance& instance) {
  for (int t = 0; t < instance.num_intervals; ++t)
    for (int b = 0; b < instance.num_nodes; ++b)
      for (int j = 0; j < instance.num_strategies; ++j)
        instance.cost[t][b][j] = cost_of(spec, instance.curtailment[t][b][j]);
}

// Node kinds: true = PV node. Load nodes get log-uniform strategies rescaled
// per interval to the configured capacity; PV nodes follow the trace.
CurtailmentInstance build(const ScenarioSpec& spec, const std::vector<bool>& is_pv, Sampler& sampler) {
  CurtailmentInstance instance = empty_instance(spec);
  instance.interval_targets = draw_targets(spec, sampler);

  std::vector<PvNode> pv(spec.nodes);
  for (int b = 0; b < spec.nodes; ++b) {
    if (!is_pv[b]) continue;
    pv[b].area = sampler.uniform(spec.pv.area_min_m2, spec.pv.area_max_m2);
    pv[b].yield = sampler.uniform(spec.pv.yield_min, spec.pv.yield_max);
  }

  std::vector<double> storage;
  const bool any_pv = std::find(is_pv.begin(), is_pv.end(), true) != is_pv.end();
  if (any_pv) {
    const auto& trace = trace_for(spec, storage);
    const int last_hour = spec.start_hour + (spec.intervals - 1) / 4;
    if (last_hour >= static_cast<int>(trace.size())) {
      std::ostringstream out;
      out << "radiance trace has " << trace.size() << " hours but the horizon reaches hour " << last_hour;
      throw TraceTooShort(out.str());
    }
    for (int t = 0; t < spec.intervals; ++t) {
      const double radiance = trace[spec.start_hour + t / 4];
      for (int b = 0; b < spec.nodes; ++b) {
        if (!is_pv[b]) continue;
        // Hourly energy split evenly over the hour's four intervals.
        const double per_interval = pv_hourly_output_kwh(radiance, pv[b].area, pv[b].yield) / 4.0;
        instance.curtailment[t][b] = solar_strategy_values(per_interval);
      }
    }
  }

  for (int t = 0; t < spec.intervals; ++t) {
    double raw_capacity = 0.0;
    for (int b = 0; b < spec.nodes; ++b) {
      if (is_pv[b]) continue;
      auto& values = instance.curtailment[t][b];
      values[0] = 0.0;
      for (int j = 1; j < kSolarStrategies; ++j) values[j] = sampler.log_uniform(spec.load_min_kwh, spec.load_max_kwh);
      std::sort(values.begin() + 1, values.end());
      raw_capacity += values.back();
    }
    if (raw_capacity <= 0.0) continue;
    const double wanted = spec.target_low > 0.0
                              ? spec.capacity_factor * spec.target_high * instance.interval_targets[t] / spec.target_low
                              : spec.capacity_factor * spec.target_high / spec.intervals;
    const double scale = wanted / raw_capacity;
    for (int b = 0; b < spec.nodes; ++b) {
      if (is_pv[b]) continue;
      for (auto& v : instance.curtailment[t][b]) v *= scale;
    }
  }

  fill_costs(spec, instance);
  if (spec.alpha) instance.budgets = proportional_budgets(instance, *spec.alpha);
  return instance;
}

}  // namespace

CurtailmentInstance generate_load(const ScenarioSpec& spec) {
  spec.check();
  Sampler sampler(spec.seed);
  return build(spec, std::vector<bool>(spec.nodes, false), sampler);
}

CurtailmentInstance generate_solar(const ScenarioSpec& spec) {
  spec.check();
  Sampler sampler(spec.seed);
  return build(spec, std::vector<bool>(spec.nodes, true), sampler);
}

CurtailmentInstance generate(const ScenarioSpec& spec) {
  switch (spec.mode) {
    case ScenarioMode::LoadCurtailment: return generate_load(spec);
    case ScenarioMode::SolarCurtailment: return generate_solar(spec);
    case ScenarioMode::Mixed: {
      spec.check();
      Sampler sampler(spec.seed);
      std::vector<bool> is_pv(spec.nodes);
      for (int b = 0; b < spec.nodes; ++b) is_pv[b] = sampler.coin();
      return build(spec, is_pv, sampler);
    }
  }
  throw std::invalid_argument("unknown scenario mode");
}

std::vector<NodeBudget> proportional_budgets(const CurtailmentInstance& instance, double alpha) {
  std::vector<double> node_max(instance.num_nodes, 0.0);
  double total = 0.0;
  for (int b = 0; b < instance.num_nodes; ++b) {
    for (int t = 0; t < instance.num_intervals; ++t) {
      const auto& row = instance.curtailment[t][b];
      node_max[b] += *std::max_element(row.begin(), row.end());
    }
    total += node_max[b];
  }
  std::vector<NodeBudget> budgets(instance.num_nodes);
  for (int b = 0; b < instance.num_nodes; ++b) {
    budgets[b].lower_fraction = alpha;
    budgets[b].upper_budget = total > 0.0 ? node_max[b] / total * instance.aggregate_cap : 0.0;
  }
  return budgets;
}

CurtailmentInstance with_budgets(CurtailmentInstance instance, double alpha) {
  instance.budgets = proportional_budgets(instance, alpha);
  return instance;
}

}  // namespace nlb
