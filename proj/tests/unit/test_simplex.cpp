#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nlb/simplex.hpp"
#include "support/hand_lps.hpp"

using namespace nlb;

TEST_CASE("hand-constructed LPs match the external oracle") {
  const auto cases = testing::load_hand_lps();
  REQUIRE(cases.size() == 30);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto solution = solve_lp(c.lp);
    CHECK(solution.status == c.status);
    if (c.status != LpStatus::Optimal || solution.status != LpStatus::Optimal) continue;
    CHECK(std::abs(solution.objective - c.optimum) <= 1e-7 * std::max(1.0, std::abs(c.optimum)));
    CHECK(max_relative_violation(c.lp, solution.values) <= 1e-7);
  }
}

TEST_CASE("one-dimensional bound case") {
  LinearProgram lp;
  const int x = lp.add_variable(1.0, 0.0, 10.0, "x");
  lp.add_row({{x, 1.0}}, RowSense::GreaterEqual, 3.0);
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.values[0] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("identical inputs give identical solutions") {
  const auto cases = testing::load_hand_lps();
  for (const auto& c : cases) {
    const auto a = solve_lp(c.lp);
    const auto b = solve_lp(c.lp);
    CHECK(a.status == b.status);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("malformed programs are rejected") {
  LinearProgram lp;
  lp.add_variable(1.0, 2.0, 1.0);
  CHECK_THROWS_AS(lp.check(), std::invalid_argument);
  LinearProgram bad_row;
  bad_row.add_variable(1.0);
  CHECK_THROWS(bad_row.add_row({{3, 1.0}}, RowSense::Equal, 0.0));
}

TEST_CASE("iteration cap raises NumericalBreakdown") {
  const auto cases = testing::load_hand_lps();
  const auto it = std::find_if(cases.begin(), cases.end(), [](const auto& c) { return c.name == "klee_minty_5"; });
  REQUIRE(it != cases.end());
  SimplexOptions options;
  options.max_iterations = 1;
  CHECK_THROWS_AS(solve_lp(it->lp, options), NumericalBreakdown);
}

TEST_CASE("MPS export lists every section") {
  LinearProgram lp;
  const int x = lp.add_variable(1.0, 0.0, 4.0, "x");
  const int y = lp.add_variable(-2.0, -1.0, kLpInfinity, "y");
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 5.0, "CAP");
  lp.add_row({{x, 1.0}}, RowSense::GreaterEqual, 1.0, "LOW");
  lp.add_row({{x, 1.0}, {y, -1.0}}, RowSense::Equal, 0.0, "EQ");
  std::ostringstream out;
  write_mps(lp, out, "TEST");
  const auto text = out.str();
  for (const char* token : {"NAME", "ROWS", " N  COST", " L  CAP", " G  LOW", " E  EQ", "COLUMNS", "RHS", "BOUNDS",
                            " UP BND", " LO BND", "ENDATA"})
    CHECK_MESSAGE(text.find(token) != std::string::npos, token);
}

TEST_CASE("max_relative_violation measures constraint breaches") {
  LinearProgram lp;
  const int x = lp.add_variable(1.0, 0.0, 1.0);
  lp.add_row({{x, 1.0}}, RowSense::GreaterEqual, 2.0);
  CHECK(max_relative_violation(lp, {1.0}) == doctest::Approx(0.5));
  CHECK(max_relative_violation(lp, {2.0}) > 0.0);  // upper bound breached
}
