#include "nlb/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace nlb {

int LinearProgram::add_variable(double cost, double lo, double hi, std::string name) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  variable_names.push_back(std::move(name));
  for (auto& row : rows) row.push_back(0.0);
  return num_variables() - 1;
}

int LinearProgram::add_row(const std::vector<std::pair<int, double>>& terms, RowSense sense, double value,
                           std::string name) {
  std::vector<double> row(objective.size(), 0.0);
  for (const auto& [var, coefficient] : terms) {
    if (var < 0 || var >= num_variables()) throw std::out_of_range("add_row: variable index out of range");
    row[var] += coefficient;
  }
  rows.push_back(std::move(row));
  senses.push_back(sense);
  rhs.push_back(value);
  row_names.push_back(std::move(name));
  return num_rows() - 1;
}

void LinearProgram::check() const {
  const std::size_t n = objective.size();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("LP bound vectors do not match the objective");
  if (senses.size() != rows.size() || rhs.size() != rows.size())
    throw std::invalid_argument("LP row senses / rhs do not match the rows");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw std::invalid_argument("LP objective has a non-finite coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kLpInfinity ||
        upper[j] == -kLpInfinity)
      throw std::invalid_argument("LP variable " + std::to_string(j) + " has inconsistent bounds");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("LP row " + std::to_string(i) + " has the wrong width");
    for (double a : rows[i])
      if (!std::isfinite(a)) throw std::invalid_argument("LP row " + std::to_string(i) + " has a non-finite entry");
    if (!std::isfinite(rhs[i])) throw std::invalid_argument("LP rhs " + std::to_string(i) + " is not finite");
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

double max_relative_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) {
    double activity = 0.0;
    double magnitude = 0.0;
    for (int j = 0; j < lp.num_variables(); ++j) {
      activity += lp.rows[i][j] * x[j];
      magnitude += std::abs(lp.rows[i][j] * x[j]);
    }
    const double scale = std::max({1.0, std::abs(lp.rhs[i]), magnitude});
    double violation = 0.0;
    switch (lp.senses[i]) {
      case RowSense::LessEqual: violation = activity - lp.rhs[i]; break;
      case RowSense::GreaterEqual: violation = lp.rhs[i] - activity; break;
      case RowSense::Equal: violation = std::abs(activity - lp.rhs[i]); break;
    }
    worst = std::max(worst, violation / scale);
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (std::isfinite(lp.lower[j]))
      worst = std::max(worst, (lp.lower[j] - x[j]) / std::max(1.0, std::abs(lp.lower[j])));
    if (std::isfinite(lp.upper[j]))
      worst = std::max(worst, (x[j] - lp.upper[j]) / std::max(1.0, std::abs(lp.upper[j])));
  }
  return worst;
}

namespace {

// x_original = offset + sum(sign * y_col)
struct VariableMap {
  double offset = 0.0;
  std::vector<std::pair<int, double>> columns;
};

enum class PhaseResult { Optimal, Unbounded };

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& options) : lp_(lp), options_(options) { build(); }

  LpSolution run() {
    LpSolution solution;
    if (!artificials_.empty()) {
      std::vector<double> phase1(cols_, 0.0);
      for (int col : artificials_) phase1[col] = 1.0;
      run_phase(phase1, /*allow_artificial=*/true);
      double infeasibility = 0.0;
      for (int i = 0; i < rows_; ++i)
        if (is_artificial_[basis_[i]]) infeasibility += beta_[i];
      if (infeasibility > options_.feasibility_tolerance * rhs_scale_) {
        solution.status = LpStatus::Infeasible;
        solution.iterations = iterations_;
        return solution;
      }
      retire_artificials();
    }

    if (run_phase(costs_, /*allow_artificial=*/false) == PhaseResult::Unbounded) {
      solution.status = LpStatus::Unbounded;
      solution.iterations = iterations_;
      return solution;
    }

    solution.status = LpStatus::Optimal;
    solution.values = extract();
    solution.iterations = iterations_;
    solution.objective = 0.0;
    for (int j = 0; j < lp_.num_variables(); ++j) solution.objective += lp_.objective[j] * solution.values[j];

    const double violation = max_relative_violation(lp_, solution.values);
    if (violation > options_.verify_tolerance) {
      std::ostringstream out;
      out << "simplex result fails re-substitution (relative violation " << violation << ")";
      throw NumericalBreakdown(out.str());
    }
    return solution;
  }

 private:
  double& at(int i, int j) { return tableau_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return tableau_[static_cast<std::size_t>(i) * cols_ + j]; }

  int add_column(double upper, double cost) {
    upper_.push_back(upper);
    costs_.push_back(cost);
    is_artificial_.push_back(false);
    return static_cast<int>(upper_.size()) - 1;
  }

  void build() {
    lp_.check();
    const int n = lp_.num_variables();
    rows_ = lp_.num_rows();

    maps_.resize(n);
    for (int j = 0; j < n; ++j) {
      const double lo = lp_.lower[j];
      const double hi = lp_.upper[j];
      const double c = lp_.objective[j];
      auto& map = maps_[j];
      if (std::isfinite(lo)) {
        map.offset = lo;
        map.columns.push_back({add_column(hi - lo, c), 1.0});
      } else if (std::isfinite(hi)) {
        map.offset = hi;
        map.columns.push_back({add_column(kLpInfinity, -c), -1.0});
      } else {
        map.columns.push_back({add_column(kLpInfinity, c), 1.0});
        map.columns.push_back({add_column(kLpInfinity, -c), -1.0});
      }
    }

    // Row-wise structural coefficients and shifted rhs.
    std::vector<std::vector<std::pair<int, double>>> entries(rows_);
    std::vector<double> shifted(rows_);
    for (int i = 0; i < rows_; ++i) {
      double b = lp_.rhs[i];
      for (int j = 0; j < n; ++j) {
        const double a = lp_.rows[i][j];
        if (a == 0.0) continue;
        b -= a * maps_[j].offset;
        for (const auto& [col, sign] : maps_[j].columns) entries[i].push_back({col, a * sign});
      }
      shifted[i] = b;
    }

    std::vector<int> slack(rows_, -1);
    std::vector<double> slack_sign(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      if (lp_.senses[i] == RowSense::Equal) continue;
      slack[i] = add_column(kLpInfinity, 0.0);
      slack_sign[i] = lp_.senses[i] == RowSense::LessEqual ? 1.0 : -1.0;
    }

    std::vector<double> row_sign(rows_, 1.0);
    std::vector<int> initial(rows_, -1);
    for (int i = 0; i < rows_; ++i) {
      if (shifted[i] < 0.0) row_sign[i] = -1.0;
      if (slack[i] >= 0 && slack_sign[i] * row_sign[i] > 0.0) {
        initial[i] = slack[i];
      } else {
        const int col = add_column(kLpInfinity, 0.0);
        is_artificial_[col] = true;
        artificials_.push_back(col);
        initial[i] = col;
      }
    }
    cols_ = static_cast<int>(upper_.size());

    tableau_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
    beta_.assign(rows_, 0.0);
    rhs_scale_ = 1.0;
    for (int i = 0; i < rows_; ++i) {
      for (const auto& [col, a] : entries[i]) at(i, col) += row_sign[i] * a;
      if (slack[i] >= 0) at(i, slack[i]) = row_sign[i] * slack_sign[i];
      if (is_artificial_[initial[i]]) at(i, initial[i]) = 1.0;
      beta_[i] = row_sign[i] * shifted[i];
      rhs_scale_ = std::max(rhs_scale_, std::abs(beta_[i]));
    }
    original_ = tableau_;
    original_rhs_ = beta_;

    basis_ = initial;
    row_of_.assign(cols_, -1);
    for (int i = 0; i < rows_; ++i) row_of_[basis_[i]] = i;
    at_upper_.assign(cols_, false);

    max_iterations_ = options_.max_iterations > 0 ? options_.max_iterations : 50 * (rows_ + cols_);
  }

  double nonbasic_value(int col) const { return at_upper_[col] ? upper_[col] : 0.0; }

  void pivot(int r, int q) {
    double* pivot_row = &tableau_[static_cast<std::size_t>(r) * cols_];
    const double inv = 1.0 / pivot_row[q];
    for (int j = 0; j < cols_; ++j) pivot_row[j] *= inv;
    pivot_row[q] = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[static_cast<std::size_t>(i) * cols_];
      const double factor = row[q];
      if (factor == 0.0) continue;
      for (int j = 0; j < cols_; ++j) row[j] -= factor * pivot_row[j];
      row[q] = 0.0;
    }
    const double dq = reduced_[q];
    if (dq != 0.0) {
      for (int j = 0; j < cols_; ++j) reduced_[j] -= dq * pivot_row[j];
      reduced_[q] = 0.0;
    }
    row_of_[basis_[r]] = -1;
    basis_[r] = q;
    row_of_[q] = r;
  }

  void price(const std::vector<double>& costs) {
    reduced_ = costs;
    for (int i = 0; i < rows_; ++i) {
      const double cb = costs[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) reduced_[j] -= cb * row[j];
    }
    for (int i = 0; i < rows_; ++i) reduced_[basis_[i]] = 0.0;
  }

  PhaseResult run_phase(const std::vector<double>& costs, bool allow_artificial) {
    price(costs);
    int degenerate_run = 0;
    bool bland = false;
    const double opt_tol = options_.optimality_tolerance;

    for (;;) {
      if (iterations_ >= max_iterations_)
        throw NumericalBreakdown("simplex iteration cap reached (" + std::to_string(max_iterations_) + ")");

      // Entering column.
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0) continue;
        if (!allow_artificial && is_artificial_[j]) continue;
        if (upper_[j] == 0.0) continue;  // fixed
        const double d = reduced_[j];
        const bool improving = at_upper_[j] ? d > opt_tol : d < -opt_tol;
        if (!improving) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
        }
      }
      if (q < 0) return PhaseResult::Optimal;

      const double direction = at_upper_[q] ? -1.0 : 1.0;

      // Ratio test over the basic variables.
      int leave = -1;
      double theta = kLpInfinity;
      double leave_alpha = 0.0;
      for (int i = 0; i < rows_; ++i) {
        const double alpha = at(i, q) * direction;
        double limit;
        if (alpha > options_.pivot_tolerance) {
          limit = beta_[i] / alpha;
        } else if (alpha < -options_.pivot_tolerance && std::isfinite(upper_[basis_[i]])) {
          limit = (upper_[basis_[i]] - beta_[i]) / -alpha;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        bool take = false;
        if (limit < theta - 1e-12) {
          take = true;
        } else if (limit <= theta + 1e-12 && leave >= 0) {
          take = bland ? basis_[i] < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          theta = limit;
          leave = i;
          leave_alpha = alpha;
        }
      }

      const double flip = upper_[q];
      if (!std::isfinite(theta) && !std::isfinite(flip)) return PhaseResult::Unbounded;

      ++iterations_;
      if (flip <= theta) {
        // Bound flip: the entering column crosses to its other bound.
        for (int i = 0; i < rows_; ++i) beta_[i] -= at(i, q) * direction * flip;
        at_upper_[q] = !at_upper_[q];
        degenerate_run = 0;
        bland = false;
        continue;
      }

      if (std::abs(at(leave, q)) < options_.pivot_tolerance)
        throw NumericalBreakdown("pivot magnitude below threshold");

      const double entering_value = nonbasic_value(q) + direction * theta;
      for (int i = 0; i < rows_; ++i) beta_[i] -= at(i, q) * direction * theta;
      const int leaving = basis_[leave];
      // The leaving variable sits on the bound it hit.
      at_upper_[leaving] = leave_alpha < 0.0;
      at_upper_[q] = false;
      pivot(leave, q);
      beta_[leave] = entering_value;

      if (theta <= options_.feasibility_tolerance) {
        if (++degenerate_run >= options_.degenerate_run_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  void retire_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (!is_artificial_[basis_[r]]) continue;
      int best = -1;
      double magnitude = 1e-7;
      for (int j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0 || is_artificial_[j]) continue;
        if (std::abs(at(r, j)) > magnitude) {
          magnitude = std::abs(at(r, j));
          best = j;
        }
      }
      if (best < 0) continue;  // redundant row
      const double value = nonbasic_value(best);
      const int leaving = basis_[r];
      reduced_.assign(cols_, 0.0);
      pivot(r, best);
      at_upper_[leaving] = false;
      at_upper_[best] = false;
      beta_[r] = value;
    }
    for (int col : artificials_) {
      upper_[col] = 0.0;
      if (row_of_[col] < 0) at_upper_[col] = false;
    }
  }

  // Basic values recomputed from the untouched standard form, which removes
  // drift accumulated over many pivots.
  std::vector<double> refactor_basic_values() const {
    const int m = rows_;
    std::vector<double> matrix(static_cast<std::size_t>(m) * m);
    std::vector<double> rhs = original_rhs_;
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k) matrix[static_cast<std::size_t>(i) * m + k] = original_[static_cast<std::size_t>(i) * cols_ + basis_[k]];
      for (int j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0) continue;
        const double v = nonbasic_value(j);
        if (v != 0.0) rhs[i] -= original_[static_cast<std::size_t>(i) * cols_ + j] * v;
      }
    }
    // Gaussian elimination with partial pivoting.
    for (int k = 0; k < m; ++k) {
      int p = k;
      for (int i = k + 1; i < m; ++i)
        if (std::abs(matrix[static_cast<std::size_t>(i) * m + k]) > std::abs(matrix[static_cast<std::size_t>(p) * m + k])) p = i;
      if (std::abs(matrix[static_cast<std::size_t>(p) * m + k]) < 1e-12) return beta_;
      if (p != k) {
        for (int j = 0; j < m; ++j) std::swap(matrix[static_cast<std::size_t>(k) * m + j], matrix[static_cast<std::size_t>(p) * m + j]);
        std::swap(rhs[k], rhs[p]);
      }
      const double pivot_value = matrix[static_cast<std::size_t>(k) * m + k];
      for (int i = k + 1; i < m; ++i) {
        const double factor = matrix[static_cast<std::size_t>(i) * m + k] / pivot_value;
        if (factor == 0.0) continue;
        for (int j = k; j < m; ++j) matrix[static_cast<std::size_t>(i) * m + j] -= factor * matrix[static_cast<std::size_t>(k) * m + j];
        rhs[i] -= factor * rhs[k];
      }
    }
    std::vector<double> solution(m);
    for (int k = m - 1; k >= 0; --k) {
      double v = rhs[k];
      for (int j = k + 1; j < m; ++j) v -= matrix[static_cast<std::size_t>(k) * m + j] * solution[j];
      solution[k] = v / matrix[static_cast<std::size_t>(k) * m + k];
    }
    return solution;
  }

  std::vector<double> extract() const {
    std::vector<double> column_values(cols_);
    for (int j = 0; j < cols_; ++j) column_values[j] = row_of_[j] >= 0 ? 0.0 : nonbasic_value(j);
    const auto basic = rows_ > 0 ? refactor_basic_values() : std::vector<double>{};
    for (int i = 0; i < rows_; ++i) {
      double v = basic[i];
      const int col = basis_[i];
      if (v < 0.0 && v > -options_.feasibility_tolerance * rhs_scale_) v = 0.0;
      if (v > upper_[col] && v < upper_[col] + options_.feasibility_tolerance * rhs_scale_) v = upper_[col];
      column_values[col] = v;
    }
    std::vector<double> x(lp_.num_variables());
    for (int j = 0; j < lp_.num_variables(); ++j) {
      double v = maps_[j].offset;
      for (const auto& [col, sign] : maps_[j].columns) v += sign * column_values[col];
      x[j] = v;
    }
    return x;
  }

  const LinearProgram& lp_;
  SimplexOptions options_;
  std::vector<VariableMap> maps_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> upper_;
  std::vector<double> costs_;
  std::vector<bool> is_artificial_;
  std::vector<int> artificials_;
  std::vector<double> tableau_;
  std::vector<double> original_;
  std::vector<double> original_rhs_;
  std::vector<double> beta_;
  std::vector<double> reduced_;
  std::vector<int> basis_;
  std::vector<int> row_of_;
  std::vector<bool> at_upper_;
  double rhs_scale_ = 1.0;
  int iterations_ = 0;
  int max_iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  Tableau tableau(lp, options);
  return tableau.run();
}

namespace {

std::string mps_name(const std::vector<std::string>& names, int index, char prefix) {
  if (index < static_cast<int>(names.size()) && !names[index].empty() && names[index].size() <= 8)
    return names[index];
  return prefix + std::to_string(index);
}

void mps_field(std::ostream& out, const std::string& text, int width) {
  out << std::left << std::setw(width) << text;
}

std::string mps_number(double value) {
  std::ostringstream out;
  out << std::setprecision(12) << value;
  return out.str();
}

}  // namespace

void write_mps(const LinearProgram& lp, std::ostream& out, const std::string& name) {
  lp.check();
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const char sense = lp.senses[i] == RowSense::LessEqual ? 'L' : lp.senses[i] == RowSense::GreaterEqual ? 'G' : 'E';
    out << " " << sense << "  " << mps_name(lp.row_names, i, 'R') << "\n";
  }
  out << "COLUMNS\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    const std::string column = mps_name(lp.variable_names, j, 'X');
    auto entry = [&](const std::string& row, double value) {
      out << "    ";
      mps_field(out, column, 10);
      mps_field(out, row, 10);
      out << mps_number(value) << "\n";
    };
    if (lp.objective[j] != 0.0) entry("COST", lp.objective[j]);
    for (int i = 0; i < lp.num_rows(); ++i)
      if (lp.rows[i][j] != 0.0) entry(mps_name(lp.row_names, i, 'R'), lp.rows[i][j]);
  }
  out << "RHS\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    if (lp.rhs[i] == 0.0) continue;
    out << "    ";
    mps_field(out, "RHS", 10);
    mps_field(out, mps_name(lp.row_names, i, 'R'), 10);
    out << mps_number(lp.rhs[i]) << "\n";
  }
  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    const std::string column = mps_name(lp.variable_names, j, 'X');
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    auto bound = [&](const char* kind, std::optional<double> value) {
      out << " " << kind << " ";
      mps_field(out, "BND", 10);
      mps_field(out, column, 10);
      if (value) out << mps_number(*value);
      out << "\n";
    };
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      bound("FR", std::nullopt);
      continue;
    }
    if (lo == hi) {
      bound("FX", lo);
      continue;
    }
    if (!std::isfinite(lo)) bound("MI", std::nullopt);
    else if (lo != 0.0) bound("LO", lo);
    if (std::isfinite(hi)) bound("UP", hi);
  }
  out << "ENDATA\n";
}

}  // namespace nlb
