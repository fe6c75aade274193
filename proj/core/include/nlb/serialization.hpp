#pragma once

// JSON and CSV formats. Key names follow the struct fields in snake_case;
// undefined ratios are written as null in JSON and as "undefined" in CSV.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nlb/evaluation.hpp"
#include "nlb/model.hpp"
#include "nlb/online.hpp"
#include "nlb/scenario.hpp"

namespace nlb {

/// Malformed document: bad JSON, wrong types, missing or unknown keys.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void to_json(nlohmann::json& j, const NodeBudget& budget);
void from_json(const nlohmann::json& j, NodeBudget& budget);
void to_json(nlohmann::json& j, const CurtailmentInstance& instance);
void from_json(const nlohmann::json& j, CurtailmentInstance& instance);
void to_json(nlohmann::json& j, const Schedule& schedule);
void from_json(const nlohmann::json& j, Schedule& schedule);
void to_json(nlohmann::json& j, const EvaluationReport& report);
void to_json(nlohmann::json& j, const BoundRecord& record);
void to_json(nlohmann::json& j, const ScenarioSpec& spec);
void from_json(const nlohmann::json& j, ScenarioSpec& spec);
void to_json(nlohmann::json& j, const OnlineContext& context);
void from_json(const nlohmann::json& j, OnlineContext& context);
void to_json(nlohmann::json& j, const OnlineStep& step);
void from_json(const nlohmann::json& j, OnlineStep& step);
void to_json(nlohmann::json& j, const OnlineSolution& solution);

/// Parses a whole JSON document; FormatError on syntax errors.
nlohmann::json parse_json(std::istream& in);
nlohmann::json parse_json(const std::string& text);

/// Converts with nlohmann's conversions, rethrowing type errors as FormatError.
template <class T>
T decode(const nlohmann::json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

CurtailmentInstance read_instance(std::istream& in);
Schedule read_schedule(std::istream& in);
ScenarioSpec read_scenario_spec(std::istream& in);

/// Two-space indented JSON followed by a newline.
void write_json(std::ostream& out, const nlohmann::json& j);

/// interval,target,curtailment,target_factor with one row per interval.
void write_report_csv(std::ostream& out, const CurtailmentInstance& instance, const EvaluationReport& report);

}  // namespace nlb
