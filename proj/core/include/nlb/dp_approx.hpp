#pragma once

// Rounded two-level dynamic program for minimum-cost net-load balancing.
//
// Curtailments are scaled by mu = eps * min_t(target_t) / M and rounded up to
// integers. A per-interval table Theta_t(g, b) holds the cheapest way for
// nodes 1..b to reach exactly g rounded units; a horizon table Phi(g, t)
// combines one Theta_t(g_t, M) entry per interval (g_t >= rounded target) into
// the cheapest total of g units. The cheapest Phi(g, T) within the search cap
// is traced back to a schedule.
//
// Guarantees for any returned schedule: every interval reaches at least
// (1 - eps) of its target and the horizon total stays within (1 + eps) of the
// cap. The cost never exceeds the cost of an exact optimum.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nlb/model.hpp"

namespace nlb {

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

class ScalingError : public std::invalid_argument {
 public:
  enum class Kind { ZeroTarget, EpsilonOutOfRange, NonIntegral };
  ScalingError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using RoundedTensor = std::vector<std::vector<std::vector<std::int64_t>>>;

struct ScaledInstance {
  double mu = 0.0;
  double epsilon = 0.0;  // 0 marks the exact (mu = 1) specialization
  RoundedTensor rounded_curtailment;       // ceil(gamma / mu), [t][b][j]
  std::vector<std::int64_t> rounded_targets;  // ceil(target_t / mu)
  std::int64_t rounded_cap = 0;            // ceil(cap / mu)
  /// Largest rounded horizon total the search accepts. floor((1 + eps) cap / mu)
  /// for the approximation scheme; equal to rounded_cap when mu = 1.
  std::int64_t search_cap = 0;
};

/// ceil(value / mu) with quotients within a relative 1e-12 of an integer
/// snapped to it, so that exact multiples are not pushed up by float noise.
std::int64_t round_up_units(double value, double mu);

/// Throws ScalingError for eps outside (0, 1] or a zero interval target.
ScaledInstance scale_instance(const CurtailmentInstance& instance, double epsilon);

/// mu = 1 specialization for instances whose curtailments, targets and cap are
/// all integers. The search cap is the cap itself, so the DP becomes exact.
ScaledInstance unit_scale(const CurtailmentInstance& instance, double tolerance = kDefaultTolerance);

/// One selectable strategy of one node after rounding.
struct RoundedOption {
  std::int64_t units = 0;
  double cost = 0.0;
  int strategy = 0;  // index into the instance's strategy axis
};
using NodeOptions = std::vector<RoundedOption>;

/// Theta_t over g in [0, max_units] and b in [1, M]. Each entry keeps its
/// minimum cost and the option index that attains it.
class ThetaTable {
 public:
  ThetaTable(std::vector<NodeOptions> nodes, std::int64_t max_units);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  std::int64_t max_units() const { return max_units_; }
  /// b is 1-based as in the recursion; g outside [0, max_units] is infeasible.
  double cost(std::int64_t units, int b) const;
  /// Option index chosen at (units, b), or -1 when the entry is infeasible.
  int choice(std::int64_t units, int b) const;
  const NodeOptions& options(int b) const { return nodes_[b - 1]; }

 private:
  std::size_t index(std::int64_t units, int b) const {
    return static_cast<std::size_t>(b - 1) * static_cast<std::size_t>(max_units_ + 1) +
           static_cast<std::size_t>(units);
  }

  std::vector<NodeOptions> nodes_;
  std::int64_t max_units_;
  std::vector<double> cost_;
  std::vector<std::int32_t> choice_;
};

/// Fills Theta for explicit per-node option lists. Ties go to the lower
/// option index (options are kept in strategy order).
ThetaTable build_theta_table(std::vector<NodeOptions> nodes, std::int64_t max_units);

/// Theta_t for interval t of a scaled instance, sized by the search cap.
ThetaTable build_theta(const ScaledInstance& scaled, const CurtailmentInstance& instance, int t);

class InconsistentTable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Walks nodes M..1 using the stored choices; returns one strategy index per
/// node. Throws InconsistentTable when (cost, units) is not a finite entry.
std::vector<int> reconstruct_interval(const ThetaTable& theta, std::int64_t units, double cost);

/// Same walk, but re-derives every choice as
/// argmin_j { Theta(g - units_j, b - 1) + cost_j } instead of reading it back.
std::vector<int> reconstruct_interval_by_argmin(const ThetaTable& theta, std::int64_t units, double cost);

/// One (cost, units) candidate of an interval, i.e. a member of S_t.
struct IntervalChoice {
  double cost = 0.0;
  std::int64_t units = 0;
  friend bool operator==(const IntervalChoice&, const IntervalChoice&) = default;
};

/// Finite Theta_t(g, M) entries with g >= min_units, ascending in g.
std::vector<IntervalChoice> candidate_set(const ThetaTable& theta, std::int64_t min_units);

/// Phi over g in [0, max_units] and t in [1, T].
class PhiTable {
 public:
  PhiTable(const std::vector<std::vector<IntervalChoice>>& candidates, std::int64_t max_units);

  int num_intervals() const { return num_intervals_; }
  std::int64_t max_units() const { return max_units_; }
  double cost(std::int64_t units, int t) const;
  /// Units taken by interval t in the entry (units, t); -1 if infeasible.
  std::int64_t chosen_units(std::int64_t units, int t) const;

  /// Cheapest g <= limit of Phi(g, T), lower g on ties.
  std::optional<std::int64_t> best_total(std::int64_t limit) const;
  /// Per-interval picks along the stored back-pointers from (units, T).
  std::vector<IntervalChoice> trace(std::int64_t units) const;

 private:
  std::size_t index(std::int64_t units, int t) const {
    return static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(max_units_ + 1) +
           static_cast<std::size_t>(units);
  }

  int num_intervals_;
  std::int64_t max_units_;
  std::vector<double> cost_;
  std::vector<std::int64_t> pick_;
  std::vector<std::vector<IntervalChoice>> candidates_;
};

struct DpSolution {
  Schedule schedule;
  double cost = 0.0;  // cost of the schedule in original units
  std::int64_t total_units = 0;
  std::vector<IntervalChoice> trace;  // chosen (cost, units) per interval
};

/// Full scheme. nullopt means no entry of Phi qualified.
std::optional<DpSolution> solve_mcnlb(const CurtailmentInstance& instance, double epsilon);

/// Scheme on an already scaled instance (used with unit_scale for exact runs).
std::optional<DpSolution> solve_scaled(const CurtailmentInstance& instance, const ScaledInstance& scaled);

}  // namespace nlb
