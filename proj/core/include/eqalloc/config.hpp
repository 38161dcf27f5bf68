#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqalloc/scenarios.hpp"

namespace eqalloc {

inline constexpr int kSchemaVersion = 1;

/// Reads a JSON file. Syntax errors carry the line and column.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Applies "a.b.0.c=value" to `doc`. The value is parsed as JSON when it
/// parses, otherwise taken as a string. Missing objects are created.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Builds and validates a scenario. Relative paths inside `doc` resolve
/// against `base_dir`.
ScenarioConfig scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// read_json_file + overrides + scenario_from_json.
ScenarioConfig load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides = {});

PolicyConfig policy_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json to_json(const PolicyConfig& config);

struct SweepGrid {
  std::vector<double> rho = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> sigma = {0.0};
};

/// Optional "sweep": { "rho": [...], "sigma": [...] } block.
SweepGrid sweep_from_json(const nlohmann::json& doc);

}  // namespace eqalloc
