#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pathparse/action.hpp"
#include "pathparse/parsing.hpp"
#include "pathparse/scenario.hpp"

namespace pathparse {

// A parsed config document. `effective` is the JSON actually used (after
// command-line overrides); its hash identifies the run.
struct ConfigDocument {
    nlohmann::json effective;
    std::optional<LatticeParams> lattice;
    ActionFunctional functional = FreeAction{};
    PhysicsConfig physics;
    // Hand-chosen actions that bypass lattice enumeration.
    std::optional<std::vector<double>> explicit_actions;
    SolverConfig solver;
    std::uint64_t path_budget = kDefaultPathBudget;
    std::optional<ScenarioConfig> scenario;
};

// Throws ValidationError("malformed_config", ...) on bad JSON or schema errors.
ConfigDocument parse_config(const nlohmann::json& document);
nlohmann::json read_json_file(const std::filesystem::path& path);

// FNV-1a over the compact dump of `document` (keys are sorted).
std::uint64_t config_hash(const nlohmann::json& document);
std::string hex64(std::uint64_t value);

}  // namespace pathparse
