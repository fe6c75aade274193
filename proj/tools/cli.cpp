#include "cli.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nlb/dp_approx.hpp"
#include "nlb/evaluation.hpp"
#include "nlb/exact_oracle.hpp"
#include "nlb/fair_rounding.hpp"
#include "nlb/online.hpp"
#include "nlb/scenario.hpp"
#include "nlb/serialization.hpp"

namespace nlb::cli {
namespace {

using nlohmann::json;

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path, std::istream& stdin_stream) {
  if (path == "-") return parse_json(stdin_stream);
  std::ifstream file(path);
  if (!file) throw IoError("cannot open '" + path + "'");
  return parse_json(file);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot write '" + path + "'");
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("target range must look like L:U, got '" + text + "'");
  std::size_t used_low = 0, used_high = 0;
  double low = 0.0, high = 0.0;
  try {
    low = std::stod(text.substr(0, colon), &used_low);
    high = std::stod(text.substr(colon + 1), &used_high);
  } catch (const std::exception&) {
    throw std::invalid_argument("target range must look like L:U, got '" + text + "'");
  }
  if (used_low != colon || used_high != text.size() - colon - 1)
    throw std::invalid_argument("target range must look like L:U, got '" + text + "'");
  if (!(low >= 0.0 && high >= low)) throw std::invalid_argument("target range needs 0 <= L <= U");
  return {low, high};
}

// Scenario flags shared by generate and sweep.
struct ScenarioFlags {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> nodes;
  std::optional<int> intervals;
  std::optional<std::string> mode;
  std::optional<std::string> cost;
  std::optional<double> capacity_factor;
  std::optional<int> start_hour;
  std::string radiance_path;
  bool paper_replication = false;

  void attach(CLI::App* app) {
    app->add_option("--spec", spec_path, "ScenarioSpec JSON file ('-' for stdin)");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--nodes", nodes, "number of nodes");
    app->add_option("--intervals", intervals, "number of 15-minute intervals");
    app->add_option("--mode", mode, "load, solar or mixed");
    app->add_option("--cost", cost, "linear or quadratic cost function");
    app->add_option("--capacity-factor", capacity_factor, "load capacity relative to U");
    app->add_option("--start-hour", start_hour, "trace hour of the first interval");
    app->add_option("--radiance", radiance_path, "hourly radiance CSV (hour,wm2)");
    app->add_flag("--paper-replication", paper_replication, "reject PV ranges outside 10-20 m^2 and 5-15% yield");
  }

  ScenarioSpec build(std::istream& in) const {
    ScenarioSpec spec;
    if (!spec_path.empty()) spec = decode<ScenarioSpec>(load_json(spec_path, in), "scenario");
    if (seed) spec.seed = *seed;
    if (nodes) spec.nodes = *nodes;
    if (intervals) spec.intervals = *intervals;
    if (mode) spec.mode = scenario_mode_from_string(*mode);
    if (cost) {
      if (*cost == "linear") spec.cost_kind = CostKind::Linear;
      else if (*cost == "quadratic") spec.cost_kind = CostKind::Quadratic;
      else throw std::invalid_argument("--cost must be linear or quadratic");
    }
    if (capacity_factor) spec.capacity_factor = *capacity_factor;
    if (start_hour) spec.start_hour = *start_hour;
    if (!radiance_path.empty()) {
      std::ifstream file(radiance_path);
      if (!file) throw IoError("cannot open '" + radiance_path + "'");
      spec.radiance_wm2 = read_radiance_csv(file);
    }
    if (paper_replication) spec.paper_replication = true;
    return spec;
  }
};

struct SolveOutcome {
  Schedule schedule;
  json extra = json::object();
};

SolveOutcome solve_online_horizon(const CurtailmentInstance& instance, const OnlineOptions& options) {
  const auto context = context_from_instance(instance);
  SolveOutcome outcome;
  outcome.schedule = Schedule::all_default(instance.num_intervals, instance.num_nodes);
  json steps = json::array();
  for (int t = 0; t < instance.num_intervals; ++t) {
    const auto solution = solve_online(context, step_from_instance(instance, t), options);
    if (!solution) throw Infeasible("no admissible strategy combination in interval " + std::to_string(t));
    outcome.schedule.assignment[t] = solution->assignment;
    steps.push_back(*solution);
  }
  outcome.extra["epsilon"] = options.epsilon;
  outcome.extra["steps"] = steps;
  return outcome;
}

SolveOutcome solve_exact(const CurtailmentInstance& instance) {
  std::optional<ExactSolution> solution;
  std::string method;
  if (instance.budgets) {
    solution = brute_force(instance, Problem::Fair);
    method = "brute_force";
  } else {
    try {
      solution = exact_dp(instance);
      method = "exact_dp";
    } catch (const OracleTooLarge&) {
      solution = brute_force(instance, Problem::Mcnlb);
      method = "brute_force";
    } catch (const std::invalid_argument&) {
      solution = brute_force(instance, Problem::Mcnlb);
      method = "brute_force";
    }
  }
  if (!solution) throw Infeasible("no schedule satisfies the constraints");
  SolveOutcome outcome{solution->schedule, json{{"method", method}}};
  return outcome;
}

SolveOutcome solve_with(const std::string& algo, const CurtailmentInstance& instance, double epsilon,
                        bool strict_filter) {
  if (algo == "dp") {
    const auto solution = solve_mcnlb(instance, epsilon);
    if (!solution) throw Infeasible("no rounded combination meets the targets within the cap");
    json trace = json::array();
    for (const auto& choice : solution->trace) trace.push_back(json{{"cost", choice.cost}, {"units", choice.units}});
    return {solution->schedule, json{{"epsilon", epsilon}, {"total_units", solution->total_units}, {"trace", trace}}};
  }
  if (algo == "fair") {
    const auto solution = solve_fair(instance);
    if (!solution) throw Infeasible("the LP relaxation is infeasible");
    json extra{{"lp_optimum", solution->lp_optimum},
               {"cost_ratio", solution->cost_ratio ? json(*solution->cost_ratio) : json(nullptr)},
               {"cost_kind", to_string(solution->cost_kind)},
               {"spacing_k", solution->diagnostics.spacing_k},
               {"lower_guarantee_applies", solution->lower_guarantee_applies}};
    const FairBounds bounds{solution->cost_kind, solution->lp_optimum, solution->lower_guarantee_applies,
                            solution->diagnostics.spacing_k};
    extra["bounds"] = bound_report(instance, solution->schedule, bounds);
    const auto proportions = budget_proportions(instance, solution->schedule);
    const auto g = gini(proportions);
    extra["gini"] = g ? json(*g) : json(nullptr);
    return {solution->schedule, extra};
  }
  if (algo == "online") return solve_online_horizon(instance, OnlineOptions{epsilon, strict_filter});
  if (algo == "exact") return solve_exact(instance);
  throw std::invalid_argument("unknown algorithm '" + algo + "' (expected dp, fair, online or exact)");
}

CurtailmentInstance load_instance(const std::string& path, std::istream& in, double tolerance) {
  auto instance = decode<CurtailmentInstance>(load_json(path, in), "instance");
  require_valid(instance, tolerance);
  return instance;
}

// --- sweep -----------------------------------------------------------------

template <class F>
void parallel_for(std::size_t count, int jobs, F body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
}

struct SweepCell {
  std::pair<double, double> range;
  double value = 0.0;
};

void fill_from_report(ExperimentRow& row, const EvaluationReport& report) {
  row.cost = report.total_cost;
  row.worst_target_factor = report.worst_target_factor();
  row.target_error_percent = target_error_percent(report);
  row.cap_factor = report.cap_violation_factor;
  row.worst_budget_upper = report.worst_budget_upper_factor();
  row.worst_budget_lower = report.worst_budget_lower_factor();
}

ExperimentRow run_cell(const std::string& algo, const ScenarioSpec& base, const SweepCell& cell,
                       std::optional<double> online_alpha, bool strict_filter) {
  ExperimentRow row;
  row.target_low = cell.range.first;
  row.target_high = cell.range.second;
  row.algo = algo;
  row.value = cell.value;
  row.status = "ok";

  ScenarioSpec spec = base;
  spec.target_low = cell.range.first;
  spec.target_high = cell.range.second;
  spec.alpha.reset();
  auto instance = generate(spec);

  if (algo == "dp") {
    row.parameter = "epsilon";
    const auto solution = solve_mcnlb(instance, cell.value);
    if (!solution) {
      row.status = "infeasible";
      return row;
    }
    fill_from_report(row, evaluate(instance, solution->schedule));
    return row;
  }

  if (algo == "fair") {
    row.parameter = "alpha";
    instance = with_budgets(std::move(instance), cell.value);
    const auto solution = solve_fair(instance);
    if (!solution) {
      row.status = "infeasible";
      return row;
    }
    fill_from_report(row, solution->report);
    row.reference_cost = solution->lp_optimum;
    row.cost_ratio = solution->cost_ratio;
    row.gini = gini(budget_proportions(instance, solution->schedule));
    return row;
  }

  row.parameter = "epsilon";
  instance = with_budgets(std::move(instance), online_alpha.value_or(0.0));
  SolveOutcome outcome;
  try {
    outcome = solve_online_horizon(instance, OnlineOptions{cell.value, strict_filter});
  } catch (const Infeasible&) {
    row.status = "infeasible";
    return row;
  }
  fill_from_report(row, evaluate(instance, outcome.schedule));
  row.gini = gini(budget_proportions(instance, outcome.schedule));
  if (const auto fair = solve_fair(instance)) {
    row.reference_cost = fair->lp_optimum;
    row.cost_ratio = safe_ratio(*row.cost, fair->lp_optimum);
  }
  return row;
}

// --- error reporting ---------------------------------------------------------

int report_error(std::ostream& err, const std::string& kind, const std::string& message, int code,
                 json details = nullptr) {
  json body{{"kind", kind}, {"message", message}};
  if (!details.is_null()) body["details"] = std::move(details);
  err << json{{"error", body}}.dump() << '\n';
  return code;
}

const char* scaling_kind(ScalingError::Kind kind) {
  switch (kind) {
    case ScalingError::Kind::ZeroTarget: return "zero_target";
    case ScalingError::Kind::EpsilonOutOfRange: return "epsilon_out_of_range";
    case ScalingError::Kind::NonIntegral: return "non_integral";
  }
  return "scaling";
}

}  // namespace

int run(const std::vector<std::string>& args, Streams streams) {
  CLI::App app{"Curtailment scheduling toolkit", "nlb"};
  app.require_subcommand(1);

  double tolerance = kDefaultTolerance;
  app.add_option("--tolerance", tolerance, "absolute tolerance for validation, relative for verify")
      ->check(CLI::PositiveNumber);

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "ScenarioSpec -> instance JSON");
  ScenarioFlags generate_flags;
  generate_flags.attach(generate_cmd);
  std::string generate_range;
  std::optional<double> generate_alpha;
  std::string generate_out;
  generate_cmd->add_option("--target-range", generate_range, "L:U in kWh");
  generate_cmd->add_option("--alpha", generate_alpha, "attach proportional budgets with this lower fraction");
  generate_cmd->add_option("-o,--out", generate_out, "output file (default stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "instance -> schedule and report JSON");
  std::string solve_instance = "-";
  std::string algo = "dp";
  double epsilon = 0.1;
  std::optional<double> solve_alpha;
  bool strict_filter = false;
  std::string solve_out, schedule_out, report_csv;
  solve_cmd->add_option("instance", solve_instance, "instance JSON ('-' for stdin)");
  solve_cmd->add_option("--algo,--alg", algo, "dp, fair, online or exact");
  solve_cmd->add_option("--epsilon", epsilon, "accuracy parameter in (0, 1]");
  solve_cmd->add_option("--alpha", solve_alpha, "replace budgets with proportional ones at this lower fraction");
  solve_cmd->add_flag("--strict-online-filter", strict_filter, "drop zero strategies outside the node band");
  solve_cmd->add_option("-o,--out", solve_out, "output file (default stdout)");
  solve_cmd->add_option("--schedule-out", schedule_out, "also write the bare schedule JSON here");
  solve_cmd->add_option("--report-csv", report_csv, "also write the per-interval report CSV here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over target ranges x epsilon or alpha -> CSV");
  ScenarioFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string sweep_algo = "dp";
  std::vector<std::string> sweep_ranges{"500:1000", "500:1500", "1000:1500"};
  std::vector<double> sweep_epsilons{0.5, 0.2, 0.1, 0.05, 0.02};
  std::vector<double> sweep_alphas{0.0, 0.05, 0.1, 0.15, 0.2};
  bool sweep_strict = false;
  int jobs = 1;
  std::string sweep_out;
  sweep_cmd->add_option("--algo,--alg", sweep_algo, "dp, fair or online");
  sweep_cmd->add_option("--target-range", sweep_ranges, "comma-separated L:U pairs")->delimiter(',');
  sweep_cmd->add_option("--epsilon", sweep_epsilons, "comma-separated epsilon grid")->delimiter(',');
  auto* alpha_opt = sweep_cmd->add_option("--alpha", sweep_alphas, "comma-separated alpha grid")->delimiter(',');
  sweep_cmd->add_flag("--strict-online-filter", sweep_strict, "drop zero strategies outside the node band");
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("-o,--out", sweep_out, "output file (default stdout)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "instance + schedule -> bound report");
  std::string verify_instance, verify_schedule, verify_algo, verify_out;
  double verify_epsilon = 0.1;
  verify_cmd->add_option("--instance", verify_instance, "instance JSON")->required();
  verify_cmd->add_option("--schedule", verify_schedule, "schedule JSON (a solve result also works)")->required();
  verify_cmd->add_option("--algo,--alg", verify_algo, "dp or fair (default: fair when budgets are present)");
  verify_cmd->add_option("--epsilon", verify_epsilon, "epsilon used for the dp bounds");
  verify_cmd->add_option("-o,--out", verify_out, "output file (default stdout)");

  // online
  auto* online_cmd = app.add_subcommand("online", "stream line-delimited interval JSON on stdin");
  std::string context_path, context_instance;
  double online_epsilon = 0.1;
  bool online_strict = false;
  online_cmd->add_option("--context", context_path, "online context JSON");
  online_cmd->add_option("--instance", context_instance, "derive the context from a budgeted instance");
  online_cmd->add_option("--epsilon", online_epsilon, "accuracy parameter in (0, 1]");
  online_cmd->add_flag("--strict-online-filter", online_strict, "drop zero strategies outside the node band");

  std::vector<std::string> argv_storage{"nlb"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    streams.out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    streams.out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    return report_error(streams.err, "usage", e.what(), kInputError);
  }

  try {
    if (generate_cmd->parsed()) {
      auto spec = generate_flags.build(streams.in);
      if (!generate_range.empty()) std::tie(spec.target_low, spec.target_high) = parse_range(generate_range);
      if (generate_alpha) spec.alpha = generate_alpha;
      emit(dump(generate(spec)), generate_out, streams.out);
      return kSuccess;
    }

    if (solve_cmd->parsed()) {
      auto instance = load_instance(solve_instance, streams.in, tolerance);
      if (solve_alpha) instance = with_budgets(std::move(instance), *solve_alpha);
      auto outcome = solve_with(algo, instance, epsilon, strict_filter);
      const auto report = evaluate(instance, outcome.schedule);
      json result{{"algo", algo}, {"status", "ok"}, {"cost", report.total_cost}};
      result["schedule"] = outcome.schedule;
      result["report"] = report;
      for (auto& item : outcome.extra.items()) result[item.key()] = item.value();
      emit(dump(result), solve_out, streams.out);
      if (!schedule_out.empty()) emit(dump(json(outcome.schedule)), schedule_out, streams.out);
      if (!report_csv.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, instance, report);
        emit(csv.str(), report_csv, streams.out);
      }
      return kSuccess;
    }

    if (sweep_cmd->parsed()) {
      if (sweep_algo != "dp" && sweep_algo != "fair" && sweep_algo != "online")
        throw std::invalid_argument("sweep supports dp, fair or online");
      const auto base = sweep_flags.build(streams.in);
      std::vector<SweepCell> cells;
      const auto& values = sweep_algo == "fair" ? sweep_alphas : sweep_epsilons;
      for (const auto& text : sweep_ranges) {
        const auto range = parse_range(text);
        for (double v : values) cells.push_back({range, v});
      }
      std::optional<double> online_alpha;
      if (sweep_algo == "online" && alpha_opt->count() > 0) online_alpha = sweep_alphas.front();

      std::vector<ExperimentRow> rows(cells.size());
      std::vector<std::exception_ptr> failures(cells.size());
      parallel_for(cells.size(), jobs, [&](std::size_t i) {
        try {
          rows[i] = run_cell(sweep_algo, base, cells[i], online_alpha, sweep_strict);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      });
      for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
      std::ostringstream csv;
      write_experiment_csv(csv, rows);
      emit(csv.str(), sweep_out, streams.out);
      return kSuccess;
    }

    if (verify_cmd->parsed()) {
      const auto instance = load_instance(verify_instance, streams.in, tolerance);
      auto schedule_doc = load_json(verify_schedule, streams.in);
      if (schedule_doc.is_object() && schedule_doc.contains("schedule")) schedule_doc = schedule_doc["schedule"];
      const auto schedule = decode<Schedule>(schedule_doc, "schedule");
      if (!schedule_fits(instance, schedule)) throw std::out_of_range("schedule does not fit the instance");

      std::string kind = verify_algo.empty() ? (instance.budgets ? "fair" : "dp") : verify_algo;
      BoundSpec spec;
      if (kind == "dp") {
        if (!(verify_epsilon > 0.0 && verify_epsilon <= 1.0))
          throw ScalingError(ScalingError::Kind::EpsilonOutOfRange, "epsilon must lie in (0, 1]");
        spec = DpBounds{verify_epsilon};
      } else if (kind == "fair") {
        const auto fair = solve_fair(instance);
        if (!fair) throw Infeasible("the LP relaxation is infeasible, so no fair bound is defined");
        const bool same = fair->schedule == schedule;
        spec = FairBounds{fair->cost_kind, fair->lp_optimum, same && fair->lower_guarantee_applies,
                          fair->diagnostics.spacing_k};
      } else {
        throw std::invalid_argument("verify supports dp or fair");
      }
      const auto records = bound_report(instance, schedule, spec, std::max(tolerance, 1e-6));
      const bool pass = all_pass(records);
      json result{{"algo", kind}, {"status", pass ? "pass" : "fail"}, {"records", records}};
      emit(dump(result), verify_out, streams.out);
      return pass ? kSuccess : kInfeasible;
    }

    if (online_cmd->parsed()) {
      OnlineContext context;
      if (!context_path.empty()) context = decode<OnlineContext>(load_json(context_path, streams.in), "context");
      else if (!context_instance.empty()) context = context_from_instance(load_instance(context_instance, streams.in, tolerance));
      else throw std::invalid_argument("online needs --context or --instance");
      context.check();
      const OnlineOptions options{online_epsilon, online_strict};
      bool any_infeasible = false;
      std::string line;
      int index = 0;
      while (std::getline(streams.in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto step = decode<OnlineStep>(parse_json(line), "online step");
        const auto solution = solve_online(context, step, options);
        json out{{"interval", index++}};
        if (solution) {
          out["status"] = "ok";
          const json fields = *solution;
          for (const auto& item : fields.items()) out[item.key()] = item.value();
        } else {
          out["status"] = "infeasible";
          any_infeasible = true;
        }
        streams.out << out.dump() << '\n';
      }
      return any_infeasible ? kInfeasible : kSuccess;
    }
  } catch (const Infeasible& e) {
    return report_error(streams.err, "infeasible", e.what(), kInfeasible);
  } catch (const ValidationError& e) {
    json issues = json::array();
    for (const auto& issue : e.issues()) issues.push_back(json{{"kind", to_string(issue.kind)}, {"detail", issue.detail}});
    return report_error(streams.err, "validation", e.what(), kInputError, issues);
  } catch (const FormatError& e) {
    return report_error(streams.err, "format", e.what(), kInputError);
  } catch (const ScalingError& e) {
    return report_error(streams.err, scaling_kind(e.kind()), e.what(), kInputError);
  } catch (const TraceTooShort& e) {
    return report_error(streams.err, "trace_too_short", e.what(), kInputError);
  } catch (const MissingBudgets& e) {
    return report_error(streams.err, "missing_budgets", e.what(), kInputError);
  } catch (const OracleTooLarge& e) {
    return report_error(streams.err, "oracle_too_large", e.what(), kInputError);
  } catch (const IoError& e) {
    return report_error(streams.err, "io", e.what(), kInputError);
  } catch (const std::out_of_range& e) {
    return report_error(streams.err, "index_out_of_range", e.what(), kInputError);
  } catch (const std::invalid_argument& e) {
    return report_error(streams.err, "input", e.what(), kInputError);
  } catch (const NumericalBreakdown& e) {
    return report_error(streams.err, "numerical_breakdown", e.what(), kInternalError);
  } catch (const std::exception& e) {
    return report_error(streams.err, "internal", e.what(), kInternalError);
  }
  return kInputError;
}

}  // namespace nlb::cli
