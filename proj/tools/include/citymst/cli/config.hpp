#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "citymst/experiments.hpp"

namespace citymst::cli {

// Reads a JSON run description. Throws Error(kParseError) with the line or
// field at fault, and Error(kValidationError) naming the violated invariant.
// Defaults: replications = 100, M = 1, seed = 0, out = "<experiment>.csv".
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view text);

// The resolved configuration as JSON text (every default filled in).
std::string describe_config(const ExperimentConfig& cfg);

}  // namespace citymst::cli
