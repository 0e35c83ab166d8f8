#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "citymst/experiments.hpp"

namespace citymst::cli {

struct RunManifest {
  std::uint64_t config_hash = 0;  // FNV-1a of the resolved config text
  std::string started;            // UTC, ISO 8601
  std::string finished;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> outputs;
  bool failed = false;
  std::string failure;
};

struct DispatchOptions {
  unsigned threads = 1;
  bool dry_run = false;
};

// Runs the configured experiment and writes its CSV (raw or aggregate) and a
// ".meta.json" sidecar next to it. A dry run validates and writes nothing.
// A hard assertion failure sets failed and writes only the sidecar. Unknown
// experiments throw Error(kUnknownExperiment).
RunManifest dispatch(const ExperimentConfig& cfg, const DispatchOptions& opts);

std::string version_string();

// Exit status for the command-line tool.
int exit_code_for(const RunManifest& manifest);

}  // namespace citymst::cli
