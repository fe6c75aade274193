#pragma once

// Seeded synthetic instances: discrete load-curtailment strategies per
// building, and solar curtailment from disconnecting fractions of a PV
// installation's hourly output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlb/fair_rounding.hpp"
#include "nlb/model.hpp"

namespace nlb {

enum class ScenarioMode { LoadCurtailment, SolarCurtailment, Mixed };
const char* to_string(ScenarioMode mode);
ScenarioMode scenario_mode_from_string(const std::string& text);

struct PvParameters {
  double area_min_m2 = 10.0;
  double area_max_m2 = 20.0;
  double yield_min = 0.05;
  double yield_max = 0.15;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  int nodes = 20;
  int intervals = 16;  // 15-minute intervals
  ScenarioMode mode = ScenarioMode::LoadCurtailment;
  double target_low = 500.0;   // L: sum of interval targets, kWh
  double target_high = 1000.0; // U: aggregate cap, kWh
  PvParameters pv;
  std::vector<double> radiance_wm2;  // hourly; empty selects the bundled clear-sky trace
  int start_hour = 10;               // trace hour of the first interval
  CostKind cost_kind = CostKind::Quadratic;
  double cost_coefficient = 2.0;     // cost = coefficient * gamma^p
  /// Load strategies are rescaled so each interval's summed best strategies
  /// reach capacity_factor * U * target_t / L.
  double capacity_factor = 2.0;
  double load_min_kwh = 1.0;         // raw log-uniform sampling range
  double load_max_kwh = 25.0;
  /// Attach proportional budgets with this lower fraction.
  std::optional<double> alpha;
  /// Reject PV ranges outside 10-20 m^2 area and 5-15% yield.
  bool paper_replication = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void check() const;
};

class TraceTooShort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kSolarStrategies = 6;

/// Disconnection settings for a PV output O: {0, O/8, O/4, O/2, 3O/4, O}.
std::vector<double> solar_strategy_values(double output_kwh);

/// Hourly PV energy in kWh for radiance (W/m^2) sustained over one hour.
double pv_hourly_output_kwh(double radiance_wm2, double area_m2, double yield);

/// 24 hourly values of a clear-sky day: 1000 sin(pi (h - 6) / 12) between
/// 06:00 and 18:00, zero otherwise.
std::vector<double> clear_sky_trace();

/// Reads a `hour,wm2` CSV (header required) into an hourly trace ordered by hour.
std::vector<double> read_radiance_csv(std::istream& in);

CurtailmentInstance generate_load(const ScenarioSpec& spec);
CurtailmentInstance generate_solar(const ScenarioSpec& spec);
/// Dispatches on spec.mode; Mixed assigns each node a load or PV profile.
CurtailmentInstance generate(const ScenarioSpec& spec);

/// B_b = (sum_t max_j gamma_bj(t)) / (sum over nodes of the same) * cap and
/// alpha_b = alpha for every node.
std::vector<NodeBudget> proportional_budgets(const CurtailmentInstance& instance, double alpha);
CurtailmentInstance with_budgets(CurtailmentInstance instance, double alpha);

}  // namespace nlb
