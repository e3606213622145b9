#pragma once

#include <filesystem>

#include <json.hpp>

#include "delaylab/experiment.hpp"

namespace delaylab {

// Reads and fully validates an experiment file. Relative paths inside the
// file resolve against its directory. Throws ConfigError naming the first
// offending key.
ExperimentConfig parse_config(const std::filesystem::path& path);

ExperimentConfig parse_config_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

DelayModel parse_delay_model(const nlohmann::json& node, const std::string& key);

}  // namespace delaylab
