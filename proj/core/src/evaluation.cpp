#include "nlb/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace nlb {

std::optional<double> gini(const std::vector<double>& values) {
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("gini needs non-negative finite values");
  if (values.empty()) return std::nullopt;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (mean <= 0.0) return std::nullopt;

  // Sorted form of the pairwise sum: sum_{i<j} (v_j - v_i) = sum_i (2i - n + 1) v_i.
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double pairwise = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) pairwise += (2.0 * i - n + 1.0) * sorted[i];
  return 2.0 * pairwise / (2.0 * n * n * mean);
}

std::vector<double> budget_proportions(const CurtailmentInstance& instance, const Schedule& schedule) {
  if (!instance.budgets) throw MissingBudgets();
  const auto report = evaluate(instance, schedule);
  std::vector<double> out;
  for (int b = 0; b < instance.num_nodes; ++b) {
    const double budget = (*instance.budgets)[b].upper_budget;
    if (budget > 0.0) out.push_back(report.per_node_curtailment[b] / budget);
  }
  return out;
}

double target_error_percent(const EvaluationReport& report) {
  double worst = 0.0;
  for (const auto& factor : report.target_violation_factors)
    if (factor) worst = std::max(worst, (1.0 - *factor) * 100.0);
  return worst;
}

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Pass: return "PASS";
    case BoundStatus::Fail: return "FAIL";
    case BoundStatus::Skipped: return "SKIPPED";
  }
  return "SKIPPED";
}

namespace {

BoundRecord at_least(std::string name, double bound, Ratio observed, double rel) {
  BoundRecord r{std::move(name), ">=", bound, observed, BoundStatus::Skipped, std::nullopt};
  if (!observed) return r;
  r.slack = *observed - bound;
  r.status = *observed >= bound * (1.0 - rel) ? BoundStatus::Pass : BoundStatus::Fail;
  return r;
}

BoundRecord at_most(std::string name, double bound, Ratio observed, double rel) {
  BoundRecord r{std::move(name), "<=", bound, observed, BoundStatus::Skipped, std::nullopt};
  if (!observed) return r;
  r.slack = bound - *observed;
  r.status = *observed <= bound * (1.0 + rel) ? BoundStatus::Pass : BoundStatus::Fail;
  return r;
}

// A zero denominator leaves the ratio undefined; the constraint still fails
// when something positive sits over it.
BoundRecord at_most_or_zero(std::string name, double bound, Ratio observed, double numerator, double rel) {
  auto r = at_most(std::move(name), bound, observed, rel);
  if (!observed && numerator > kDefaultTolerance) r.status = BoundStatus::Fail;
  return r;
}

Ratio worst_ratio(const std::vector<BudgetFactors>& factors, bool upper) {
  Ratio worst;
  for (const auto& f : factors) {
    const Ratio& r = upper ? f.upper : f.lower;
    if (r && (!worst || (upper ? *r > *worst : *r < *worst))) worst = r;
  }
  return worst;
}

}  // namespace

std::vector<BoundRecord> bound_report(const CurtailmentInstance& instance, const Schedule& schedule,
                                      const BoundSpec& spec, double relative_tolerance) {
  const auto report = evaluate(instance, schedule);
  std::vector<BoundRecord> records;

  if (const auto* dp = std::get_if<DpBounds>(&spec)) {
    records.push_back(at_least("interval_target", 1.0 - dp->epsilon, report.worst_target_factor(), relative_tolerance));
    records.push_back(at_most_or_zero("aggregate_cap", 1.0 + dp->epsilon, report.cap_violation_factor,
                                      report.aggregate_curtailment, relative_tolerance));
    return records;
  }

  const auto& fair = std::get<FairBounds>(spec);
  const double cost_bound = fair.cost_kind == CostKind::Linear ? 2.0 : 4.0;
  auto cost = at_most_or_zero("cost_factor", cost_bound, safe_ratio(report.total_cost, fair.lp_optimum),
                              report.total_cost, relative_tolerance);
  if (fair.cost_kind == CostKind::Custom) cost.status = BoundStatus::Skipped;
  records.push_back(cost);
  records.push_back(at_most_or_zero("aggregate_cap", 2.0, report.cap_violation_factor, report.aggregate_curtailment,
                                    relative_tolerance));

  if (!report.budget_violation_factors) throw MissingBudgets();
  const auto& factors = *report.budget_violation_factors;
  auto node_upper = at_most("node_budget_upper", 2.0, worst_ratio(factors, true), relative_tolerance);
  for (int b = 0; b < instance.num_nodes; ++b)
    if (!factors[b].upper && report.per_node_curtailment[b] > kDefaultTolerance) node_upper.status = BoundStatus::Fail;
  records.push_back(node_upper);

  const double lower = 1.0 / fair.spacing_k;
  auto interval = at_least("interval_target", lower, report.worst_target_factor(), relative_tolerance);
  auto node_lower = at_least("node_budget_lower", lower, worst_ratio(factors, false), relative_tolerance);
  if (!fair.lower_guarantee_applies) {
    interval.status = BoundStatus::Skipped;
    node_lower.status = BoundStatus::Skipped;
  }
  records.push_back(interval);
  records.push_back(node_lower);
  return records;
}

bool all_pass(const std::vector<BoundRecord>& records) {
  return std::none_of(records.begin(), records.end(),
                      [](const BoundRecord& r) { return r.status == BoundStatus::Fail; });
}

double scaling_fit(const std::vector<ScalingSample>& samples) {
  if (samples.size() < 4) throw DegenerateSamples("scaling fit needs at least four samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].size > 0.0) || !(samples[i].runtime > 0.0))
      throw DegenerateSamples("scaling fit needs positive sizes and runtimes");
    if (i > 0 && !(samples[i].size > samples[i - 1].size))
      throw DegenerateSamples("scaling fit needs strictly increasing sizes");
  }
  const double n = static_cast<double>(samples.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& s : samples) {
    sx += std::log(s.size);
    sy += std::log(s.runtime);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& s : samples) {
    const double dx = std::log(s.size) - mx;
    sxy += dx * (std::log(s.runtime) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double average = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = average;
    i = j + 1;
  }
  return r;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

void cell(std::ostream& out, const std::optional<double>& value) {
  out << ',';
  if (value) out << *value;
}

}  // namespace

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  const auto precision = out.precision(12);
  out << "L,U,algo,parameter,value,status,cost,reference_cost,cost_ratio,worst_target_factor,"
         "target_error_percent,cap_factor,worst_budget_upper,worst_budget_lower,gini\n";
  for (const auto& row : rows) {
    out << row.target_low << ',' << row.target_high << ',' << row.algo << ',' << row.parameter << ',' << row.value
        << ',' << row.status;
    cell(out, row.cost);
    cell(out, row.reference_cost);
    cell(out, row.cost_ratio);
    cell(out, row.worst_target_factor);
    out << ',' << row.target_error_percent;
    cell(out, row.cap_factor);
    cell(out, row.worst_budget_upper);
    cell(out, row.worst_budget_lower);
    cell(out, row.gini);
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace nlb
