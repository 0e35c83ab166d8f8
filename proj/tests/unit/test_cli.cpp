#include <gtest/gtest.h>

#include <filesystem>

#include "citymst/cli/config.hpp"
#include "citymst/cli/dispatch.hpp"
#include "citymst/error.hpp"
#include "citymst/io.hpp"

using namespace citymst;
using citymst::cli::parse_config_text;

namespace {

Error error_of(std::string_view text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorCode::kAssertionFailure, "no error");
}

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "citymst_cli_test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Config, MinimalFillsDefaults) {
  const auto cfg = parse_config_text(R"({"experiment": "mstc-scaling", "n": 1000, "layout": "all",
                                         "density": {"kind": "uniform"}})");
  EXPECT_EQ(cfg.experiment, "mstc-scaling");
  EXPECT_EQ(cfg.n_values, (std::vector<std::int64_t>{1000}));
  EXPECT_EQ(cfg.replications, 100);
  EXPECT_EQ(cfg.M, 1.0);
  EXPECT_EQ(cfg.master_seed, 0u);
  ASSERT_TRUE(cfg.layout);
  EXPECT_EQ(cfg.layout->size(), 1u);
  EXPECT_EQ(cfg.out, "mstc-scaling.csv");
}

TEST(Config, FullDocument) {
  const auto cfg = parse_config_text(R"({
    "experiment": "city-moments",
    "n": [5000, 10000],
    "layout": {"r": 0.1, "s": 0.2, "cities": [[0, 0], [1, 0], [1, 1]]},
    "density": {"kind": "cosine", "delta": 0.5},
    "replications": 12,
    "seed": 18446744073709551615,
    "M": 2.5,
    "out": "x/y.csv",
    "raw": true
  })");
  EXPECT_EQ(cfg.n_values.size(), 2u);
  EXPECT_EQ(cfg.layout->size(), 3u);
  EXPECT_EQ(cfg.density.kind(), DensityKind::kCosine);
  EXPECT_DOUBLE_EQ(cfg.density.delta(), 0.5);
  EXPECT_EQ(cfg.master_seed, 18446744073709551615ull);
  EXPECT_EQ(cfg.M, 2.5);
  EXPECT_TRUE(cfg.raw);
  // describe_config round-trips.
  const auto again = parse_config_text(cli::describe_config(cfg));
  EXPECT_EQ(cli::describe_config(again), cli::describe_config(cfg));
}

TEST(Config, NonIntegerGridIsValidationError) {
  const auto e = error_of(R"({"experiment": "mstc-scaling", "n": 100, "layout": {"r": 0.1, "s": 0.25}})");
  EXPECT_EQ(e.code(), ErrorCode::kValidationError);
  EXPECT_NE(std::string(e.what()).find("NonIntegerGrid"), std::string::npos);
}

TEST(Config, DisconnectedSelectionIsValidationError) {
  const auto e = error_of(R"({"experiment": "mstc-scaling", "n": 100,
                              "layout": {"r": 0.1, "s": 0.2, "cities": [[0, 0], [2, 0]]}})");
  EXPECT_EQ(e.code(), ErrorCode::kValidationError);
  EXPECT_NE(std::string(e.what()).find("NotWellConnected"), std::string::npos);
}

TEST(Config, CloseCitiesWarnAndDisableLowerBound) {
  const auto cfg = parse_config_text(R"({"experiment": "mstc-scaling", "n": 100, "layout": {"r": 0.1, "s": 0.05}})");
  EXPECT_FALSE(cfg.lower_bound);
  ASSERT_EQ(cfg.warnings.size(), 1u);
  EXPECT_NE(cfg.warnings[0].find("lower bound disabled"), std::string::npos);
}

TEST(Config, ParseErrorsNameLineOrField) {
  auto e = error_of("{\n  \"experiment\": \"x\",\n  \"n\": [1, 2,\n}");
  EXPECT_EQ(e.code(), ErrorCode::kParseError);
  EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  e = error_of(R"({"experiment": "x", "n": 10, "replications": "many"})");
  EXPECT_EQ(e.code(), ErrorCode::kParseError);
  EXPECT_NE(std::string(e.what()).find("replications"), std::string::npos);
  e = error_of(R"({"n": 10})");
  EXPECT_NE(std::string(e.what()).find("experiment"), std::string::npos);
}

TEST(Config, InvariantViolations) {
  auto e = error_of(R"({"experiment": "x", "n": [10, 10]})");
  EXPECT_EQ(e.code(), ErrorCode::kValidationError);
  EXPECT_NE(std::string(e.what()).find("StrictlyIncreasingN"), std::string::npos);
  e = error_of(R"({"experiment": "x", "n": 10, "replications": 1})");
  EXPECT_NE(std::string(e.what()).find("ReplicationsAtLeast2"), std::string::npos);
  e = error_of(R"({"experiment": "x", "n": 10, "density": {"kind": "cosine", "delta": 1.5}})");
  EXPECT_EQ(e.code(), ErrorCode::kValidationError);
}

TEST(Dispatch, WritesCsvAndSidecar) {
  const auto dir = scratch("dispatch");
  auto cfg = parse_config_text(R"({"experiment": "mstc-scaling", "n": [200, 400], "replications": 3, "seed": 5,
                                   "layout": {"r": 0.1, "s": 0.2}})");
  cfg.out = (dir / "run.csv").string();
  const auto manifest = cli::dispatch(cfg, {2, false});
  EXPECT_FALSE(manifest.failed);
  ASSERT_EQ(manifest.outputs.size(), 2u);
  for (const auto& path : manifest.outputs) EXPECT_GT(std::filesystem::file_size(path), 0u);
  EXPECT_EQ(manifest.outputs[1].filename(), "run.meta.json");
  const auto table = read_csv(dir / "run.csv");
  EXPECT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.columns.front(), "n");
  const auto meta = read_text(dir / "run.meta.json");
  for (const char* key : {"\"config\"", "\"seed\"", "\"version\"", "\"wall_seconds\"", "\"started\""}) {
    EXPECT_NE(meta.find(key), std::string::npos) << key;
  }
  // The library call gives the same table.
  EXPECT_EQ(to_csv(run_mstc_scaling(cfg, {1}).aggregate), read_text(dir / "run.csv"));
}

TEST(Dispatch, RawModeHasOneRowPerReplication) {
  const auto dir = scratch("raw");
  auto cfg = parse_config_text(R"({"experiment": "unconstrained", "n": [50, 100], "replications": 4, "raw": true})");
  cfg.out = (dir / "u.csv").string();
  cli::dispatch(cfg, {1, false});
  EXPECT_EQ(read_csv(dir / "u.csv").rows.size(), 8u);
}

TEST(Dispatch, DryRunWritesNothing) {
  const auto dir = scratch("dry");
  auto cfg = parse_config_text(R"({"experiment": "unconstrained", "n": 100})");
  cfg.out = (dir / "none.csv").string();
  const auto manifest = cli::dispatch(cfg, {1, true});
  EXPECT_TRUE(manifest.outputs.empty());
  EXPECT_FALSE(std::filesystem::exists(dir / "none.csv"));
}

TEST(Dispatch, UnknownExperiment) {
  auto cfg = parse_config_text(R"({"experiment": "teleport", "n": 100})");
  try {
    cli::dispatch(cfg, {1, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownExperiment);
  }
}

TEST(Dispatch, ExitCodes) {
  cli::RunManifest ok;
  EXPECT_EQ(cli::exit_code_for(ok), 0);
  ok.failed = true;
  EXPECT_NE(cli::exit_code_for(ok), 0);
}
