#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssinit/plant.hpp"
#include "ssinit/solver.hpp"

namespace ssinit::cli {

inline constexpr const char* config_schema = "ssinit-config/1";

struct VerifySettings {
    double horizon = 10.0;
    double dt = 1.0;
    double max_drift = 1e-6;
};

struct RunConfig {
    PlantGraph plant;
    /// Applied through PlantGraph::set_backward when set.
    std::optional<BlockMode> mode;
    SolverConfig solver;
    HomotopySchedule homotopy;
    VerifySettings verify;
    /// Output blocks whose off-design target follows --load.
    std::vector<std::string> load_outputs;
};

nlohmann::json plant_to_json(const PlantGraph& plant);
/// Throws ConfigError on unknown component types, missing fields or bad values.
PlantGraph plant_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);
/// Reads and parses a configuration file; every failure is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Demo plant with default solver and verification settings.
RunConfig demo_config();

/// Reads a JSON file; throws ConfigError when missing or malformed.
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace ssinit::cli
