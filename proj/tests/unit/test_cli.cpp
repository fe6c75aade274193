#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = nlb::cli::run(args, {in, out, err});
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const char* name) { return std::string(NLB_TOOLS_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "nlb_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("solve the bundled instance") {
  for (const char* algo : {"dp", "exact"}) {
    const auto r = run({"solve", data("tiny_instance.json"), "--algo", algo, "--epsilon", "0.2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["cost"] == 82.0);
    CHECK(j["status"] == "ok");
    CHECK(j["schedule"]["assignment"] == json::parse("[[1,1]]"));
  }
}

TEST_CASE("infeasible instance exits with 1 and an error document") {
  const auto r = run({"solve", data("infeasible_instance.json")});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  const auto j = json::parse(r.err);
  CHECK(j["error"]["kind"] == "infeasible");
  CHECK(j["error"]["message"].is_string());
}

TEST_CASE("input errors exit with 2") {
  CHECK(run({"solve", "--algo", "magic", data("tiny_instance.json")}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const auto bad = run({"solve", "-"}, "{not json");
  CHECK(bad.code == 2);
  CHECK(json::parse(bad.err)["error"]["kind"] == "format");
  const auto missing = run({"solve", "/nonexistent/instance.json"});
  CHECK(json::parse(missing.err)["error"]["kind"] == "io");
  const auto eps = run({"solve", data("tiny_instance.json"), "--epsilon", "2"});
  CHECK(eps.code == 2);
  CHECK(json::parse(eps.err)["error"]["kind"] == "epsilon_out_of_range");
  const auto fair = run({"solve", data("tiny_instance.json"), "--algo", "fair"});
  CHECK(json::parse(fair.err)["error"]["kind"] == "missing_budgets");
}

TEST_CASE("invalid instances report every issue") {
  const auto r = run({"solve", "-"}, R"({"num_nodes":1,"num_strategies":2,"num_intervals":1,
    "curtailment":[[[1,4]]],"cost":[[[0,-8]]],"interval_targets":[40],"aggregate_cap":4})");
  CHECK(r.code == 2);
  const auto j = json::parse(r.err);
  CHECK(j["error"]["kind"] == "validation");
  CHECK(j["error"]["details"].size() >= 3);
}

TEST_CASE("generate, solve and verify round trip") {
  for (int seed = 1; seed <= 6; ++seed) {
    const auto instance_path = scratch("instance_" + std::to_string(seed) + ".json");
    const auto result_path = scratch("result_" + std::to_string(seed) + ".json");
    const auto mode = seed % 3 == 0 ? "mixed" : "load";
    REQUIRE(run({"generate", "--seed", std::to_string(seed), "--nodes", "8", "--intervals", "4", "--mode", mode,
                 "--target-range", "100:200", "--alpha", "0.1", "-o", instance_path.string()})
                .code == 0);
    for (const char* algo : {"fair", "dp"}) {
      CAPTURE(seed);
      CAPTURE(algo);
      REQUIRE(run({"solve", instance_path.string(), "--algo", algo, "-o", result_path.string()}).code == 0);
      const auto verified =
          run({"verify", "--instance", instance_path.string(), "--schedule", result_path.string(), "--algo", algo});
      CHECK(verified.code == 0);
      CHECK(json::parse(verified.out)["status"] == "pass");
    }
  }
}

TEST_CASE("verify flags a schedule that breaks the bounds") {
  const auto schedule = scratch("zero_schedule.json");
  write_file(schedule, R"({"assignment":[[0,0]]})");
  const auto r = run({"verify", "--instance", data("tiny_instance.json"), "--schedule", schedule.string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["status"] == "fail");
}

TEST_CASE("identical inputs give identical bytes") {
  const std::vector<std::string> gen{"generate", "--seed", "42", "--nodes", "10", "--intervals", "8", "--mode", "mixed"};
  CHECK(run(gen).out == run(gen).out);
  const std::vector<std::string> sweep{"sweep", "--algo", "fair", "--nodes", "6", "--intervals", "4",
                                       "--target-range", "100:200,100:300", "--alpha", "0,0.1"};
  auto single = sweep;
  single.insert(single.end(), {"--jobs", "1"});
  auto parallel = sweep;
  parallel.insert(parallel.end(), {"--jobs", "4"});
  const auto a = run(single);
  const auto b = run(parallel);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("fair sweep gini does not increase with alpha") {
  const auto r = run({"sweep", "--algo", "fair", "--nodes", "12", "--intervals", "8", "--capacity-factor", "0.75",
                      "--target-range", "500:1000", "--alpha", "0,0.05,0.1,0.15,0.2"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  std::vector<double> ginis;
  while (std::getline(lines, line)) {
    const auto last = line.rfind(',');
    REQUIRE(last != std::string::npos);
    REQUIRE(line.find(",ok,") != std::string::npos);
    ginis.push_back(std::stod(line.substr(last + 1)));
  }
  REQUIRE(ginis.size() == 5);
  for (std::size_t i = 1; i < ginis.size(); ++i) CHECK(ginis[i] <= ginis[i - 1] + 1e-9);
}

TEST_CASE("online streams one line per step") {
  const auto context = scratch("context.json");
  write_file(context, R"({"historical_target_total":7,"historical_cap":10,"budgets":[[0,5],[0,4]]})");
  const std::string steps =
      R"({"target":7,"curtailment":[[0,5],[0,4]],"cost":[[0,50],[0,32]]})"
      "\n\n"
      R"({"target":70,"curtailment":[[0,5],[0,4]],"cost":[[0,50],[0,32]]})"
      "\n";
  const auto r = run({"online", "--context", context.string(), "--epsilon", "0.2"}, steps);
  CHECK(r.code == 1);
  std::istringstream lines(r.out);
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(json::parse(first)["status"] == "ok");
  CHECK(json::parse(first)["cost"] == 82.0);
  CHECK(json::parse(second)["interval"] == 1);
  CHECK(json::parse(second)["status"] == "infeasible");
}
