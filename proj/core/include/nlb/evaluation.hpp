#pragma once

// Experiment metrics: Gini fairness, bound checks against the solvers'
// guarantees, power-law runtime fits and CSV experiment tables.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nlb/fair_rounding.hpp"
#include "nlb/model.hpp"

namespace nlb {

/// Population Gini coefficient sum_i sum_j |v_i - v_j| / (2 n^2 mean).
/// nullopt for an empty or all-zero input. Throws std::invalid_argument on
/// negative or non-finite values.
std::optional<double> gini(const std::vector<double>& values);

/// Achieved curtailment of each node as a proportion of its budget B_b;
/// nodes with B_b = 0 are left out. Requires budgets.
std::vector<double> budget_proportions(const CurtailmentInstance& instance, const Schedule& schedule);

/// Largest per-interval shortfall below the target in percent (0 when every
/// target is met). Intervals with a zero target are skipped.
double target_error_percent(const EvaluationReport& report);

enum class BoundStatus { Pass, Fail, Skipped };
const char* to_string(BoundStatus status);

struct BoundRecord {
  std::string name;
  std::string relation;  // ">=" or "<="
  double bound = 0.0;
  Ratio observed;
  BoundStatus status = BoundStatus::Skipped;
  Ratio slack;  // distance to the bound, positive when satisfied
};

/// Approximation scheme: per-interval factor >= 1 - eps, aggregate <= 1 + eps.
struct DpBounds {
  double epsilon = 0.1;
};

/// Budgeted rounding: cost <= 2 (linear) or 4 (quadratic) times the LP
/// optimum, aggregate and node ceilings within 2, and when the lower-side
/// guarantee applies interval targets and node floors within 1/k.
struct FairBounds {
  CostKind cost_kind = CostKind::Custom;
  double lp_optimum = 0.0;
  bool lower_guarantee_applies = false;
  double spacing_k = 1.0;
};

using BoundSpec = std::variant<DpBounds, FairBounds>;

/// One record per constraint family. Comparisons allow relative_tolerance on
/// the bound.
std::vector<BoundRecord> bound_report(const CurtailmentInstance& instance, const Schedule& schedule,
                                      const BoundSpec& spec, double relative_tolerance = 1e-6);

bool all_pass(const std::vector<BoundRecord>& records);

class DegenerateSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScalingSample {
  double size = 0.0;
  double runtime = 0.0;
};

/// Least-squares slope of log(runtime) against log(size). Needs at least four
/// samples with strictly increasing positive sizes and positive runtimes.
double scaling_fit(const std::vector<ScalingSample>& samples);

/// Spearman rank correlation with average ranks for ties; nullopt when either
/// side is constant or the lengths differ or are below 2.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

/// One sweep cell.
struct ExperimentRow {
  double target_low = 0.0;
  double target_high = 0.0;
  std::string algo;
  std::string parameter;  // "epsilon" or "alpha"
  double value = 0.0;
  std::string status;     // "ok", "infeasible" or an error kind
  std::optional<double> cost;
  std::optional<double> reference_cost;  // LP optimum for fair runs
  Ratio cost_ratio;
  Ratio worst_target_factor;
  double target_error_percent = 0.0;
  Ratio cap_factor;
  Ratio worst_budget_upper;
  Ratio worst_budget_lower;
  std::optional<double> gini;
};

/// Header plus one line per row; undefined values are empty cells. No timing
/// columns, so identical sweeps give identical bytes.
void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

}  // namespace nlb
