#pragma once

// Dense bounded-variable primal simplex for small and medium linear programs.
//
//   minimize    c^T x
//   subject to  row_i(x) {<=, >=, =} rhs_i
//               lower_j <= x_j <= upper_j   (either side may be infinite)
//
// Two phases over a full tableau. Pricing is Dantzig's largest reduced cost;
// after a run of degenerate pivots it falls back to Bland's rule until the
// objective moves again.

#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlb {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;  // dense coefficients, one per variable
  std::vector<RowSense> senses;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> variable_names;  // optional, used by the MPS export
  std::vector<std::string> row_names;       // optional

  int num_variables() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  /// Appends a variable and returns its index.
  int add_variable(double cost, double lo = 0.0, double hi = kLpInfinity, std::string name = {});
  /// Appends a row from (variable, coefficient) terms and returns its index.
  int add_row(const std::vector<std::pair<int, double>>& terms, RowSense sense, double rhs, std::string name = {});

  /// Throws std::invalid_argument on inconsistent dimensions, non-finite
  /// coefficients or lower > upper.
  void check() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double optimality_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  /// Tolerance of the final re-substitution check, relative to the row scale.
  double verify_tolerance = 1e-7;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_run_limit = 50;
  /// 0 selects 50 * (rows + columns) of the internal standard form.
  int max_iterations = 0;
};

class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Largest violation of any row or bound by x, each scaled by
/// max(1, |rhs|, sum |a_ij x_j|) (bounds by max(1, |bound|)).
double max_relative_violation(const LinearProgram& lp, const std::vector<double>& x);

/// Fixed-format MPS export for cross-checking with external solvers.
void write_mps(const LinearProgram& lp, std::ostream& out, const std::string& name = "NLB");

}  // namespace nlb
