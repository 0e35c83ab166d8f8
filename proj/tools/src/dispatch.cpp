#include "citymst/cli/dispatch.hpp"

#include <chrono>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "citymst/cli/config.hpp"
#include "citymst/error.hpp"
#include "citymst/io.hpp"
#include "citymst/rng.hpp"

#ifndef CITYMST_VERSION
#define CITYMST_VERSION "unknown"
#endif

namespace citymst::cli {

namespace {

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                  std::chrono::system_clock::now())));
}

std::filesystem::path meta_path(const std::filesystem::path& csv) {
  auto meta = csv;
  meta.replace_extension(".meta.json");
  return meta;
}

}  // namespace

std::string version_string() { return CITYMST_VERSION; }

RunManifest dispatch(const ExperimentConfig& cfg, const DispatchOptions& opts) {
  if (!parse_experiment_kind(cfg.experiment)) {
    throw Error(ErrorCode::kUnknownExperiment, fmt::format("unknown experiment '{}'", cfg.experiment));
  }
  const std::string resolved = describe_config(cfg);
  RunManifest manifest;
  manifest.config_hash = label_hash(resolved.c_str());
  manifest.started = utc_now();
  if (opts.dry_run) {
    manifest.finished = manifest.started;
    return manifest;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<ExperimentTables> tables;
  try {
    tables = run_experiment(cfg, RunOptions{opts.threads});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAssertionFailure) throw;
    manifest.failed = true;
    manifest.failure = e.what();
    spdlog::error("{}", e.what());
  }
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.finished = utc_now();

  const std::filesystem::path csv = cfg.out;
  nlohmann::json meta;
  meta["config"] = nlohmann::json::parse(resolved);
  meta["seed"] = cfg.master_seed;
  meta["config_hash"] = fmt::format("{:016x}", manifest.config_hash);
  meta["version"] = version_string();
  meta["threads"] = opts.threads;
  meta["mode"] = cfg.raw ? "raw" : "aggregate";
  meta["started"] = manifest.started;
  meta["finished"] = manifest.finished;
  meta["wall_seconds"] = manifest.wall_seconds;
  meta["warnings"] = cfg.warnings;
  meta["failed"] = manifest.failed;
  if (manifest.failed) meta["failure"] = manifest.failure;
  if (tables) {
    const Table& table = cfg.raw ? tables->raw : tables->aggregate;
    write_csv(table, csv);
    manifest.outputs.push_back(csv);
    meta["columns"] = table.columns;
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [key, value] : tables->summary) summary[key] = value;
    meta["summary"] = summary;
  }
  const auto meta_file = meta_path(csv);
  write_text(meta_file, meta.dump(2) + "\n");
  manifest.outputs.push_back(meta_file);
  return manifest;
}

int exit_code_for(const RunManifest& manifest) { return manifest.failed ? 1 : 0; }

}  // namespace citymst::cli
