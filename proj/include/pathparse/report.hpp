#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pathparse/field.hpp"
#include "pathparse/parsing.hpp"
#include "pathparse/propagator.hpp"
#include "pathparse/scenario.hpp"

namespace pathparse {

inline constexpr const char* kToolVersion = "0.1.0";

// JSON report bodies. Each top-level report carries a "schema" tag.
nlohmann::json to_json(const ProbabilityReport& report);
nlohmann::json to_json(const Partition& partition);
nlohmann::json to_json(const ParsingResult& result);
nlohmann::json to_json(const FieldHistory& field);
nlohmann::json to_json(const PhaseFrontReport& fronts);
nlohmann::json to_json(const GroupReport& group);
nlohmann::json to_json(const ScenarioReport& report);

// CSV tables; doubles are printed with 17 significant digits.
std::string conditional_csv(const std::vector<ConditionalEntry>& rows);  // site_index,position,probability
std::string fringe_csv(const std::vector<ConditionalEntry>& rows);       // site,position,probability
// With `fronts`, adds slope_jump and discontinuity columns for interior sites.
std::string field_csv(const FieldHistory& field, const PhaseFrontReport* fronts = nullptr);
std::string sorkin_csv(const TripleSlitMetrics& metrics);

std::string format_double(double value);

}  // namespace pathparse
