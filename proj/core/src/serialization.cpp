#include "nlb/serialization.hpp"

#include <istream>
#include <ostream>
#include <set>

namespace nlb {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing key '") + key + "'");
  return *it;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + " must be a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw FormatError(std::string(what) + " has unknown key '" + item.key() + "'");
}

template <class T>
void read_optional(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  out = decode<T>(*it, key);
}

json ratio(const Ratio& r) { return r ? json(*r) : json(nullptr); }

}  // namespace

void to_json(json& j, const NodeBudget& budget) {
  j = json{{"lower_fraction", budget.lower_fraction}, {"upper_budget", budget.upper_budget}};
}

void from_json(const json& j, NodeBudget& budget) {
  if (j.is_array()) {
    if (j.size() != 2) throw FormatError("budget pair must have two entries");
    budget.lower_fraction = decode<double>(j[0], "lower_fraction");
    budget.upper_budget = decode<double>(j[1], "upper_budget");
    return;
  }
  reject_unknown(j, {"lower_fraction", "upper_budget"}, "budget");
  budget.lower_fraction = decode<double>(field(j, "lower_fraction"), "lower_fraction");
  budget.upper_budget = decode<double>(field(j, "upper_budget"), "upper_budget");
}

void to_json(json& j, const CurtailmentInstance& instance) {
  j = json{{"num_nodes", instance.num_nodes},
           {"num_strategies", instance.num_strategies},
           {"num_intervals", instance.num_intervals},
           {"curtailment", instance.curtailment},
           {"cost", instance.cost},
           {"interval_targets", instance.interval_targets},
           {"aggregate_cap", instance.aggregate_cap}};
  if (instance.budgets) j["budgets"] = *instance.budgets;
}

void from_json(const json& j, CurtailmentInstance& instance) {
  reject_unknown(j,
                 {"num_nodes", "num_strategies", "num_intervals", "curtailment", "cost", "interval_targets",
                  "aggregate_cap", "budgets"},
                 "instance");
  instance.num_nodes = decode<int>(field(j, "num_nodes"), "num_nodes");
  instance.num_strategies = decode<int>(field(j, "num_strategies"), "num_strategies");
  instance.num_intervals = decode<int>(field(j, "num_intervals"), "num_intervals");
  instance.curtailment = decode<Tensor3>(field(j, "curtailment"), "curtailment");
  instance.cost = decode<Tensor3>(field(j, "cost"), "cost");
  instance.interval_targets = decode<std::vector<double>>(field(j, "interval_targets"), "interval_targets");
  instance.aggregate_cap = decode<double>(field(j, "aggregate_cap"), "aggregate_cap");
  instance.budgets.reset();
  const auto it = j.find("budgets");
  if (it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError("budgets must be an array");
    std::vector<NodeBudget> budgets;
    for (const auto& entry : *it) {
      NodeBudget budget;
      from_json(entry, budget);
      budgets.push_back(budget);
    }
    instance.budgets = std::move(budgets);
  }
}

void to_json(json& j, const Schedule& schedule) { j = json{{"assignment", schedule.assignment}}; }

void from_json(const json& j, Schedule& schedule) {
  reject_unknown(j, {"assignment"}, "schedule");
  schedule.assignment = decode<std::vector<std::vector<int>>>(field(j, "assignment"), "assignment");
}

void to_json(json& j, const EvaluationReport& report) {
  json targets = json::array();
  for (const auto& r : report.target_violation_factors) targets.push_back(ratio(r));
  j = json{{"total_cost", report.total_cost},
           {"per_interval_curtailment", report.per_interval_curtailment},
           {"aggregate_curtailment", report.aggregate_curtailment},
           {"per_node_curtailment", report.per_node_curtailment},
           {"target_violation_factors", targets},
           {"cap_violation_factor", ratio(report.cap_violation_factor)}};
  if (report.budget_violation_factors) {
    json budgets = json::array();
    for (const auto& f : *report.budget_violation_factors)
      budgets.push_back(json{{"lower", ratio(f.lower)}, {"upper", ratio(f.upper)}});
    j["budget_violation_factors"] = budgets;
  } else {
    j["budget_violation_factors"] = nullptr;
  }
}

void to_json(json& j, const BoundRecord& record) {
  j = json{{"name", record.name},
           {"relation", record.relation},
           {"bound", record.bound},
           {"observed", ratio(record.observed)},
           {"status", to_string(record.status)},
           {"slack", ratio(record.slack)}};
}

void to_json(json& j, const ScenarioSpec& spec) {
  j = json{{"seed", spec.seed},
           {"nodes", spec.nodes},
           {"intervals", spec.intervals},
           {"mode", to_string(spec.mode)},
           {"target_low", spec.target_low},
           {"target_high", spec.target_high},
           {"pv",
            {{"area_min_m2", spec.pv.area_min_m2},
             {"area_max_m2", spec.pv.area_max_m2},
             {"yield_min", spec.pv.yield_min},
             {"yield_max", spec.pv.yield_max}}},
           {"radiance_wm2", spec.radiance_wm2},
           {"start_hour", spec.start_hour},
           {"cost_kind", to_string(spec.cost_kind)},
           {"cost_coefficient", spec.cost_coefficient},
           {"capacity_factor", spec.capacity_factor},
           {"load_min_kwh", spec.load_min_kwh},
           {"load_max_kwh", spec.load_max_kwh},
           {"alpha", spec.alpha ? json(*spec.alpha) : json(nullptr)},
           {"paper_replication", spec.paper_replication}};
}

void from_json(const json& j, ScenarioSpec& spec) {
  reject_unknown(j,
                 {"seed", "nodes", "intervals", "mode", "target_low", "target_high", "pv", "radiance_wm2",
                  "start_hour", "cost_kind", "cost_coefficient", "capacity_factor", "load_min_kwh", "load_max_kwh",
                  "alpha", "paper_replication"},
                 "scenario");
  read_optional(j, "seed", spec.seed);
  read_optional(j, "nodes", spec.nodes);
  read_optional(j, "intervals", spec.intervals);
  if (j.contains("mode")) {
    try {
      spec.mode = scenario_mode_from_string(decode<std::string>(j["mode"], "mode"));
    } catch (const FormatError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  read_optional(j, "target_low", spec.target_low);
  read_optional(j, "target_high", spec.target_high);
  if (j.contains("pv")) {
    const auto& pv = j["pv"];
    reject_unknown(pv, {"area_min_m2", "area_max_m2", "yield_min", "yield_max"}, "pv");
    read_optional(pv, "area_min_m2", spec.pv.area_min_m2);
    read_optional(pv, "area_max_m2", spec.pv.area_max_m2);
    read_optional(pv, "yield_min", spec.pv.yield_min);
    read_optional(pv, "yield_max", spec.pv.yield_max);
  }
  read_optional(j, "radiance_wm2", spec.radiance_wm2);
  read_optional(j, "start_hour", spec.start_hour);
  if (j.contains("cost_kind")) {
    const auto kind = decode<std::string>(j["cost_kind"], "cost_kind");
    if (kind == "linear") spec.cost_kind = CostKind::Linear;
    else if (kind == "quadratic") spec.cost_kind = CostKind::Quadratic;
    else throw FormatError("cost_kind must be 'linear' or 'quadratic'");
  }
  read_optional(j, "cost_coefficient", spec.cost_coefficient);
  read_optional(j, "capacity_factor", spec.capacity_factor);
  read_optional(j, "load_min_kwh", spec.load_min_kwh);
  read_optional(j, "load_max_kwh", spec.load_max_kwh);
  if (j.contains("alpha")) {
    if (j["alpha"].is_null()) spec.alpha.reset();
    else spec.alpha = decode<double>(j["alpha"], "alpha");
  }
  read_optional(j, "paper_replication", spec.paper_replication);
}

void to_json(json& j, const OnlineContext& context) {
  j = json{{"historical_target_total", context.historical_target_total},
           {"historical_cap", context.historical_cap},
           {"budgets", context.budgets}};
}

void from_json(const json& j, OnlineContext& context) {
  reject_unknown(j, {"historical_target_total", "historical_cap", "budgets"}, "online context");
  context.historical_target_total = decode<double>(field(j, "historical_target_total"), "historical_target_total");
  context.historical_cap = decode<double>(field(j, "historical_cap"), "historical_cap");
  context.budgets.clear();
  const auto& budgets = field(j, "budgets");
  if (!budgets.is_array()) throw FormatError("budgets must be an array");
  for (const auto& entry : budgets) {
    NodeBudget budget;
    from_json(entry, budget);
    context.budgets.push_back(budget);
  }
}

void to_json(json& j, const OnlineStep& step) {
  j = json{{"target", step.target}, {"curtailment", step.curtailment}, {"cost", step.cost}};
}

void from_json(const json& j, OnlineStep& step) {
  reject_unknown(j, {"target", "curtailment", "cost"}, "online step");
  step.target = decode<double>(field(j, "target"), "target");
  step.curtailment = decode<std::vector<std::vector<double>>>(field(j, "curtailment"), "curtailment");
  step.cost = decode<std::vector<std::vector<double>>>(field(j, "cost"), "cost");
}

void to_json(json& j, const OnlineSolution& solution) {
  j = json{{"assignment", solution.assignment},
           {"cost", solution.cost},
           {"curtailment", solution.curtailment},
           {"upper_target", solution.bounds.upper_target},
           {"node_lower", solution.bounds.node_lower},
           {"node_upper", solution.bounds.node_upper}};
}

json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

CurtailmentInstance read_instance(std::istream& in) { return decode<CurtailmentInstance>(parse_json(in), "instance"); }
Schedule read_schedule(std::istream& in) { return decode<Schedule>(parse_json(in), "schedule"); }
ScenarioSpec read_scenario_spec(std::istream& in) { return decode<ScenarioSpec>(parse_json(in), "scenario"); }

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void write_report_csv(std::ostream& out, const CurtailmentInstance& instance, const EvaluationReport& report) {
  const auto precision = out.precision(17);
  out << "interval,target,curtailment,target_factor\n";
  for (int t = 0; t < instance.num_intervals; ++t) {
    out << t << ',' << instance.interval_targets[t] << ',' << report.per_interval_curtailment[t] << ',';
    if (report.target_violation_factors[t]) out << *report.target_violation_factors[t];
    else out << "undefined";
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace nlb
