#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cmrac/scenario.hpp"
#include "cmrac/simulator.hpp"

namespace cmrac {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parses a scenario JSON document (schema in README.md). Throws ParseError.
[[nodiscard]] ScenarioConfig scenario_from_json(std::string_view text);
[[nodiscard]] std::string scenario_to_json(const ScenarioConfig& config);

/// Throws IoError if the file cannot be read, ParseError on malformed content.
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);

[[nodiscard]] std::string summary_to_json(const RunSummary& summary, const TraceMetadata& meta,
                                          const std::optional<RunFailure>& failure);

}  // namespace cmrac
