#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "kscale/datagen.hpp"
#include "kscale/experiment.hpp"
#include "kscale/partition.hpp"
#include "kscale/validity.hpp"

namespace kscale {

/// clustering.json: assignments, centroids, weights (nullable), criterion,
/// k, p, method, seed.
nlohmann::json clustering_to_json(const Clustering& clustering, double p, const std::string& method,
                                  std::uint64_t seed);
Clustering clustering_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const KSelectionReport& report);

/// One line of records.ndjson (no trailing newline). Excludes wall time.
std::string record_to_json_line(const ExperimentRecord& record);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace kscale
