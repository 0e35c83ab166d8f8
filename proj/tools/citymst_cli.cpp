#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "citymst/bounds.hpp"
#include "citymst/cli/config.hpp"
#include "citymst/cli/dispatch.hpp"
#include "citymst/error.hpp"
#include "citymst/io.hpp"
#include "citymst/mst.hpp"
#include "citymst/sampling.hpp"

using namespace citymst;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool dry_run = false;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg;
  if (!g.config.empty()) cfg = cli::parse_config(g.config);
  if (g.seed) cfg.master_seed = *g.seed;
  return cfg;
}

int run_generate(const Globals& g, std::optional<std::int64_t> n, const std::string& process,
                 const std::string& out) {
  auto cfg = load(g);
  if (n) cfg.n_values = {*n};
  if (cfg.n_values.empty()) throw Error(ErrorCode::kInvalidArgument, "generate needs --n or a config with n");
  const auto count = cfg.n_values.front();
  if (g.dry_run) {
    fmt::print("{}\n", cli::describe_config(cfg));
    return 0;
  }
  SampleBatch batch;
  if (!cfg.layout) {
    if (process != "binomial") throw Error(ErrorCode::kInvalidArgument, "Poisson batches need a city layout");
    batch = sample_unit_square(count, cfg.density, cfg.master_seed);
  } else if (process == "poisson") {
    batch = sample_poisson_cities(count, *cfg.layout, cfg.density, cfg.master_seed);
  } else {
    batch = sample_binomial_cities(count, *cfg.layout, cfg.density, cfg.master_seed);
  }
  write_csv(points_table(batch.points), out);
  fmt::print("wrote {} points to {}\n", batch.points.size(), out);
  return 0;
}

int run_mst(const Globals& g, const std::string& input, const std::string& out) {
  const auto points = points_from_table(read_csv(input));
  if (g.dry_run) {
    fmt::print("{} points read from {}\n", points.size(), input);
    return 0;
  }
  const auto tree = exact_mst(points);
  if (!out.empty()) write_csv(tree_table(tree), out);
  fmt::print("{}\n", format_double(tree.total_len()));
  return 0;
}

int run_bound(const Globals& g, const std::string& input, const std::string& builder, int k,
              const std::string& out) {
  const auto points = points_from_table(read_csv(input));
  const auto cfg = load(g);
  if (g.dry_run) {
    fmt::print("{} points, builder {}\n", points.size(), builder);
    return 0;
  }
  const auto need_layout = [&]() -> const CityLayout& {
    if (!cfg.layout) throw Error(ErrorCode::kInvalidArgument, fmt::format("builder '{}' needs a config with a city layout", builder));
    return *cfg.layout;
  };
  if (builder == "strips") {
    const auto plan = strips_path(points, AxisSquare::unit());
    if (!out.empty()) write_csv(tree_table(plan.to_tree(points)), out);
    fmt::print("length {} guarantee {}\n", format_double(plan.path_len), format_double(plan.guarantee()));
  } else if (builder == "grid") {
    const auto joined = grid_join(points, k);
    if (!out.empty()) write_csv(tree_table(joined.tree), out);
    fmt::print("length {} cells {} joins {}\n", format_double(joined.tree.total_len()),
               format_double(joined.cell_mst_sum), format_double(joined.join_len));
  } else if (builder == "upper") {
    const auto upper = city_upper_tree(points, need_layout());
    if (!out.empty()) write_csv(tree_table(upper.tree), out);
    fmt::print("length {} bound {} all_occupied {}\n", format_double(upper.tree.total_len()),
               format_double(upper.bound), upper.all_occupied);
  } else if (builder == "lower") {
    fmt::print("{}\n", format_double(city_lower_bound(points, need_layout())));
  } else {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown builder '{}'", builder));
  }
  return 0;
}

int run_experiment_cmd(const Globals& g, bool raw) {
  if (g.config.empty()) throw Error(ErrorCode::kInvalidArgument, "experiment needs --config");
  auto cfg = load(g);
  if (raw) cfg.raw = true;
  if (g.dry_run) {
    if (!parse_experiment_kind(cfg.experiment)) {
      throw Error(ErrorCode::kUnknownExperiment, fmt::format("unknown experiment '{}'", cfg.experiment));
    }
    fmt::print("{}\n", cli::describe_config(cfg));
    return 0;
  }
  const auto manifest = cli::dispatch(cfg, {g.threads, false});
  for (const auto& path : manifest.outputs) fmt::print("wrote {}\n", path.string());
  fmt::print("config {:016x}, {:.2f} s\n", manifest.config_hash, manifest.wall_seconds);
  if (manifest.failed) fmt::print(stderr, "FAILED: {}\n", manifest.failure);
  return cli::exit_code_for(manifest);
}

int run_report(const Globals& g, const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<Table> raws;
  for (const auto& in : inputs) raws.push_back(read_csv(in));
  if (g.dry_run) {
    fmt::print("{} tables\n", raws.size());
    return 0;
  }
  const auto table = aggregate_raw(raws);
  if (out.empty()) {
    fmt::print("{}", to_csv(table));
  } else {
    write_csv(table, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum spanning trees of nodes confined to city squares"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::version_string());

  Globals g;
  app.add_option("--config", g.config, "JSON run description")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--threads", g.threads, "worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u));
  app.add_flag("--dry-run", g.dry_run, "validate and print what would run");
  app.fallthrough();

  std::optional<std::int64_t> gen_n;
  std::string gen_process = "binomial";
  std::string gen_out = "points.csv";
  auto* gen = app.add_subcommand("generate", "sample a point batch to CSV (idx,x,y)");
  gen->add_option("--n", gen_n, "number of nodes (or the mean, for Poisson)");
  gen->add_option("--process", gen_process, "binomial or poisson")
      ->check(CLI::IsMember({"binomial", "poisson"}));
  gen->add_option("-o,--out", gen_out, "output CSV");

  std::string mst_in;
  std::string mst_out;
  auto* mst = app.add_subcommand("mst", "exact Euclidean MST of a point CSV");
  mst->add_option("input", mst_in, "point CSV")->required()->check(CLI::ExistingFile);
  mst->add_option("-o,--out", mst_out, "tree CSV (i,j,len)");

  std::string bound_in;
  std::string bound_builder = "strips";
  std::string bound_out;
  int bound_k = 4;
  auto* bound = app.add_subcommand("bound", "run one constructive builder on a point CSV");
  bound->add_option("input", bound_in, "point CSV")->required()->check(CLI::ExistingFile);
  bound->add_option("--builder", bound_builder, "strips, grid, upper or lower")
      ->check(CLI::IsMember({"strips", "grid", "upper", "lower"}));
  bound->add_option("--k", bound_k, "cells per side for the grid builder")->check(CLI::PositiveNumber);
  bound->add_option("-o,--out", bound_out, "tree CSV (i,j,len)");

  bool exp_raw = false;
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment from --config");
  exp->add_flag("--raw", exp_raw, "one row per (n, replication)");

  std::vector<std::string> report_in;
  std::string report_out;
  auto* report = app.add_subcommand("report", "aggregate raw experiment CSVs per n");
  report->add_option("inputs", report_in, "raw CSVs")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", report_out, "aggregate CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) return run_generate(g, gen_n, gen_process, gen_out);
    if (*mst) return run_mst(g, mst_in, mst_out);
    if (*bound) return run_bound(g, bound_in, bound_builder, bound_k, bound_out);
    if (*exp) return run_experiment_cmd(g, exp_raw);
    if (*report) return run_report(g, report_in, report_out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    switch (e.code()) {
      case ErrorCode::kParseError:
      case ErrorCode::kValidationError:
        return 3;
      case ErrorCode::kUnknownExperiment:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 2;
}
