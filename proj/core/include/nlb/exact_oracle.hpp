#pragma once

// Ground-truth solvers for small instances.

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "nlb/model.hpp"

namespace nlb {

enum class Problem { Mcnlb, Fair };

class OracleTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactSolution {
  Schedule schedule;
  double cost = 0.0;
};

struct BruteForceOptions {
  std::uint64_t enumeration_cap = 10'000'000;
  double tolerance = kDefaultTolerance;
};

/// Number of assignments N^(M*T), saturated at UINT64_MAX.
std::uint64_t assignment_count(const CurtailmentInstance& instance);

/// Enumerates every assignment in mixed-radix order (assignment[0][0] most
/// significant) and keeps the first cheapest one satisfying the exact
/// constraints of the chosen problem. Throws OracleTooLarge above the cap.
std::optional<ExactSolution> brute_force(const CurtailmentInstance& instance, Problem problem,
                                         const BruteForceOptions& options = {});

/// Unrounded two-level DP over integer curtailments: per-interval exact-sum
/// tables, then the cheapest combination with every interval at or above its
/// target and the horizon total at most the cap. Throws OracleTooLarge when
/// the cap exceeds table_cap and std::invalid_argument for non-integer data.
std::optional<ExactSolution> exact_dp(const CurtailmentInstance& instance, std::int64_t table_cap = 1'000'000);

}  // namespace nlb
