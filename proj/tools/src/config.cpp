#include "citymst/cli/config.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "citymst/error.hpp"
#include "citymst/io.hpp"

namespace citymst::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownFields{
    "experiment", "n",   "layout", "density", "replications",        "seed",
    "M",          "out", "raw",    "lower_bound", "correlation_pairs", "exact_leave_one_out"};

[[noreturn]] void field_error(std::string_view field, std::string_view what) {
  throw Error(ErrorCode::kParseError, fmt::format("field '{}': {}", field, what));
}

[[noreturn]] void invalid(std::string_view invariant, std::string_view detail) {
  throw Error(ErrorCode::kValidationError, fmt::format("{}: {}", invariant, detail));
}

std::int64_t get_int(const json& v, std::string_view field) {
  if (!v.is_number_integer()) field_error(field, "expected an integer");
  return v.get<std::int64_t>();
}

double get_number(const json& v, std::string_view field) {
  if (!v.is_number()) field_error(field, "expected a number");
  return v.get<double>();
}

std::vector<std::int64_t> parse_n(const json& v) {
  std::vector<std::int64_t> out;
  if (v.is_array()) {
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(get_int(v[k], fmt::format("n[{}]", k)));
  } else {
    out.push_back(get_int(v, "n"));
  }
  if (out.empty()) invalid("NonEmptyGrid", "n lists no values");
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out[k] < 1) invalid("PositiveN", fmt::format("n[{}] = {} is not positive", k, out[k]));
    if (k > 0 && out[k] <= out[k - 1]) {
      invalid("StrictlyIncreasingN", fmt::format("n[{}] = {} does not exceed n[{}] = {}", k, out[k], k - 1, out[k - 1]));
    }
  }
  return out;
}

std::optional<CityLayout> parse_layout(const json& v) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "unconstrained") return std::nullopt;
    if (name == "all") return CityLayout::unit_square();
    field_error("layout", fmt::format("unknown layout '{}' (expected \"unconstrained\", \"all\" or an object)", name));
  }
  if (!v.is_object()) field_error("layout", "expected a string or an object");
  if (!v.contains("r")) field_error("layout.r", "missing");
  if (!v.contains("s")) field_error("layout.s", "missing");
  const double r = get_number(v["r"], "layout.r");
  const double s = get_number(v["s"], "layout.s");
  try {
    const json cities = v.value("cities", json("all"));
    if (cities.is_string()) {
      if (cities.get<std::string>() != "all") field_error("layout.cities", "expected \"all\" or a list of [i, j]");
      return CityLayout::all_cities(r, s);
    }
    if (!cities.is_array()) field_error("layout.cities", "expected \"all\" or a list of [i, j]");
    std::vector<LatticeCoord> coords;
    for (std::size_t k = 0; k < cities.size(); ++k) {
      const auto& c = cities[k];
      const auto field = fmt::format("layout.cities[{}]", k);
      if (!c.is_array() || c.size() != 2) field_error(field, "expected [i, j]");
      coords.push_back({static_cast<int>(get_int(c[0], field)), static_cast<int>(get_int(c[1], field))});
    }
    return CityLayout::with_selection(r, s, std::move(coords));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    invalid(to_string(e.code()), e.what());
  }
}

DensitySpec parse_density(const json& v) {
  std::string kind;
  double delta = 0.0;
  if (v.is_string()) {
    kind = v.get<std::string>();
  } else if (v.is_object()) {
    if (!v.contains("kind") || !v["kind"].is_string()) field_error("density.kind", "expected a string");
    kind = v["kind"].get<std::string>();
    if (v.contains("delta")) delta = get_number(v["delta"], "density.delta");
  } else {
    field_error("density", "expected a string or an object");
  }
  if (kind == "uniform") return DensitySpec::uniform();
  if (kind == "cosine") {
    try {
      return DensitySpec::cosine(delta);
    } catch (const Error& e) {
      invalid("DensityBounded", e.what());
    }
  }
  field_error("density.kind", fmt::format("unknown density '{}'", kind));
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorCode::kParseError, fmt::format("line {}, column {}: {}", line, col, e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "line 1: top level must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownFields.contains(key)) {
      cfg.warnings.push_back(fmt::format("ignoring unknown field '{}'", key));
      spdlog::warn("config: ignoring unknown field '{}'", key);
    }
  }
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    field_error("experiment", "expected a string");
  }
  cfg.experiment = doc["experiment"].get<std::string>();
  if (!doc.contains("n")) field_error("n", "missing");
  cfg.n_values = parse_n(doc["n"]);
  if (doc.contains("layout")) cfg.layout = parse_layout(doc["layout"]);
  if (doc.contains("density")) cfg.density = parse_density(doc["density"]);
  if (doc.contains("replications")) cfg.replications = get_int(doc["replications"], "replications");
  if (cfg.replications < 2) {
    invalid("ReplicationsAtLeast2", fmt::format("replications = {}", cfg.replications));
  }
  if (doc.contains("seed")) {
    const auto& seed = doc["seed"];
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      field_error("seed", "expected a non-negative 64-bit integer");
    }
    cfg.master_seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("M")) cfg.M = get_number(doc["M"], "M");
  if (!(cfg.M > 0.0)) invalid("PositiveM", fmt::format("M = {}", cfg.M));
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) field_error("out", "expected a path string");
    cfg.out = doc["out"].get<std::string>();
  }
  if (cfg.out.empty()) cfg.out = cfg.experiment + ".csv";
  if (doc.contains("raw")) {
    if (!doc["raw"].is_boolean()) field_error("raw", "expected true or false");
    cfg.raw = doc["raw"].get<bool>();
  }
  if (doc.contains("lower_bound")) {
    if (!doc["lower_bound"].is_boolean()) field_error("lower_bound", "expected true or false");
    cfg.lower_bound = doc["lower_bound"].get<bool>();
  }
  if (doc.contains("correlation_pairs")) {
    const auto pairs = get_int(doc["correlation_pairs"], "correlation_pairs");
    if (pairs < 1) invalid("PositivePairs", fmt::format("correlation_pairs = {}", pairs));
    cfg.correlation_pairs = static_cast<std::size_t>(pairs);
  }
  if (doc.contains("exact_leave_one_out")) {
    if (!doc["exact_leave_one_out"].is_boolean()) field_error("exact_leave_one_out", "expected true or false");
    cfg.exact_leave_one_out = doc["exact_leave_one_out"].get<bool>();
  }

  if (cfg.layout && cfg.lower_bound && !cfg.layout->well_separated() &&
      cfg.experiment == "mstc-scaling") {
    cfg.lower_bound = false;
    cfg.warnings.push_back(fmt::format("s = {} <= r sqrt(2) = {}; lower bound disabled", cfg.layout->s(),
                                       cfg.layout->r() * std::sqrt(2.0)));
    spdlog::warn("config: {}", cfg.warnings.back());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, fmt::format("line 0: {}", e.what()));
  }
  return parse_config_text(text);
}

std::string describe_config(const ExperimentConfig& cfg) {
  json doc;
  doc["experiment"] = cfg.experiment;
  doc["n"] = cfg.n_values;
  if (!cfg.layout) {
    doc["layout"] = "unconstrained";
  } else {
    json layout{{"r", cfg.layout->r()}, {"s", cfg.layout->s()}};
    if (cfg.layout->selects_all()) {
      layout["cities"] = "all";
    } else {
      json cities = json::array();
      for (const auto& c : cfg.layout->selected()) cities.push_back({c.i, c.j});
      layout["cities"] = cities;
    }
    layout["city_count"] = cfg.layout->size();
    doc["layout"] = layout;
  }
  if (cfg.density.kind() == DensityKind::kUniform) {
    doc["density"] = {{"kind", "uniform"}};
  } else {
    doc["density"] = {{"kind", "cosine"}, {"delta", cfg.density.delta()}};
  }
  doc["replications"] = cfg.replications;
  doc["seed"] = cfg.master_seed;
  doc["M"] = cfg.M;
  doc["out"] = cfg.out;
  doc["raw"] = cfg.raw;
  doc["lower_bound"] = cfg.lower_bound;
  doc["correlation_pairs"] = cfg.correlation_pairs;
  doc["exact_leave_one_out"] = cfg.exact_leave_one_out;
  return doc.dump(2);
}

}  // namespace citymst::cli
