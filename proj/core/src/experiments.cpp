#include "citymst/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "citymst/bounds.hpp"
#include "citymst/error.hpp"
#include "citymst/mst.hpp"
#include "citymst/parallel.hpp"
#include "citymst/rng.hpp"

namespace citymst {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBandHalfWidth = 0.05;

struct ExperimentName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr std::array<ExperimentName, 4> kNames{{
    {ExperimentKind::kMstcScaling, "mstc-scaling"},
    {ExperimentKind::kCityMoments, "city-moments"},
    {ExperimentKind::kUnconstrained, "unconstrained"},
    {ExperimentKind::kOnePointDiff, "one-point-diff"},
}};

void check_grid(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty()) throw Error(ErrorCode::kInvalidArgument, "no n values");
  if (cfg.replications < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("replications must be >= 2, got {}", cfg.replications));
  }
  for (std::size_t k = 0; k < cfg.n_values.size(); ++k) {
    if (cfg.n_values[k] < 1) throw Error(ErrorCode::kInvalidArgument, "n values must be positive");
    if (k > 0 && cfg.n_values[k] <= cfg.n_values[k - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "n values must be strictly increasing");
    }
  }
}

bool close_enough(double lhs, double rhs) {
  return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
}

// MST length of each city's nodes, 0 when the city holds at most 2.
std::vector<double> city_lengths(std::span<const Point2> points, const CityLayout& layout) {
  const auto members = city_members(points, layout);
  std::vector<double> lengths(members.size(), 0.0);
  std::vector<Point2> local;
  for (std::size_t l = 0; l < members.size(); ++l) {
    if (members[l].size() < 3) continue;
    local.clear();
    for (const auto m : members[l]) local.push_back(points[m]);
    lengths[l] = exact_mst(local).total_len();
  }
  return lengths;
}

// Cities whose nodes do not induce a connected subtree of the MST. Zero
// means every MST path between two nodes of one city stays in that city.
std::int64_t locality_violations(const WeightedTree& mst, std::span<const Point2> points,
                                 const CityLayout& layout, std::span<const std::int64_t> counts) {
  std::vector<std::size_t> city(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) city[p] = *layout.city_of(points[p]);
  std::vector<std::int64_t> internal(counts.size(), 0);
  for (const auto& e : mst.edges()) {
    if (city[e.i] == city[e.j]) ++internal[city[e.i]];
  }
  std::int64_t bad = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > 0 && internal[l] != counts[l] - 1) ++bad;
  }
  return bad;
}

std::int64_t as_int(bool b) { return b ? 1 : 0; }

std::vector<std::pair<std::size_t, std::size_t>> pick_pairs(std::size_t cities, std::size_t wanted,
                                                            std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t total = cities * (cities - 1) / 2;
  if (wanted >= total) {
    for (std::size_t a = 0; a < cities; ++a) {
      for (std::size_t b = a + 1; b < cities; ++b) pairs.emplace_back(a, b);
    }
    return pairs;
  }
  Philox4x32 rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (pairs.size() < wanted) {
    auto a = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(cities));
    auto b = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(cities));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) pairs.emplace_back(a, b);
  }
  return pairs;
}

std::size_t cell_index(Point2 p, int k) {
  const auto at = [k](double v) { return std::clamp(static_cast<int>(std::floor(v * k)), 0, k - 1); };
  return static_cast<std::size_t>(at(p.x)) * static_cast<std::size_t>(k) +
         static_cast<std::size_t>(at(p.y));
}

std::vector<Point2> without(std::span<const Point2> points, std::size_t j) {
  std::vector<Point2> out;
  out.reserve(points.size() - 1);
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (p != j) out.push_back(points[p]);
  }
  return out;
}

}  // namespace

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

std::string_view to_string(ExperimentKind kind) {
  for (const auto& entry : kNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

const CityLayout& ExperimentConfig::layout_or_unit() const {
  static const CityLayout unit = CityLayout::unit_square();
  return layout ? *layout : unit;
}

// ---- mstc-scaling ------------------------------------------------------

MstcScalingResult run_mstc_scaling(const ExperimentConfig& cfg, const RunOptions& opts) {
  check_grid(cfg);
  const CityLayout& layout = cfg.layout_or_unit();
  bool lower_enabled = cfg.lower_bound;
  if (lower_enabled && !layout.well_separated()) {
    spdlog::warn("s = {} <= r sqrt(2) = {}: lower bound disabled", layout.s(),
                 layout.r() * std::sqrt(2.0));
    lower_enabled = false;
  }
  const auto cities = static_cast<std::int64_t>(layout.size());
  const double join_allowance =
      static_cast<double>(cities - 1) * (layout.s() + 8.0 * layout.r());

  MstcScalingResult result;
  result.raw.columns = {"n",         "rep",           "count",       "mstc",
                        "b_n",       "ratio",         "lower",       "upper_len",
                        "upper_bound", "small_city_correction", "all_occupied", "u_tot",
                        "sandwich_ok", "dominance_ok", "locality_violations"};
  result.aggregate.columns = {"n",
                              "reps",
                              "b_n",
                              "ratio_mean",
                              "ratio_var",
                              "ratio_std",
                              "ratio_stderr",
                              "ratio_min",
                              "ratio_max",
                              "mstc_mean",
                              "mstc_var",
                              "band_lo",
                              "band_hi",
                              "band_frequency",
                              "u_tot_frequency",
                              "occupied_frequency",
                              "sandwich_checked",
                              "sandwich_violations",
                              "dominance_violations",
                              "locality_violations"};

  for (const auto n : cfg.n_values) {
    const double b_n = b_scale(layout.r(), n, cities);
    auto samples = parallel_map(
        static_cast<std::size_t>(cfg.replications), opts.threads, [&](std::size_t rep) {
          const auto seed = derive_seed(cfg.master_seed, {label_hash("mstc"),
                                                          static_cast<std::uint64_t>(n), rep});
          const auto batch = sample_binomial_cities(n, layout, cfg.density, seed);
          const auto& pts = batch.points;
          MstcSample s;
          s.count = static_cast<std::int64_t>(pts.size());
          const WeightedTree mst = exact_mst(pts);
          s.mstc = mst.total_len();
          s.ratio = s.mstc / b_n;
          const auto upper = city_upper_tree(pts, layout);
          s.upper_len = upper.tree.total_len();
          s.upper_bound = upper.bound;
          s.all_occupied = upper.all_occupied;
          s.u_tot = occupancy_event_U(upper.counts, n, layout.size(), cfg.density).all;
          for (std::size_t l = 0; l < upper.counts.size(); ++l) {
            if (upper.counts[l] <= 2) s.small_city_correction += upper.city_mst[l];
          }
          s.locality_violations = locality_violations(mst, pts, layout, upper.counts);
          s.dominance_ok = close_enough(s.mstc, s.upper_len) && close_enough(s.upper_len, s.upper_bound);
          s.lower = kNaN;
          if (lower_enabled) {
            s.lower = city_lower_bound(pts, layout);
            if (s.all_occupied) {
              s.sandwich_checked = true;
              s.sandwich_ok = close_enough(s.lower, s.mstc) && close_enough(s.mstc, s.upper_len) &&
                              close_enough(s.upper_len,
                                           s.lower + join_allowance + s.small_city_correction);
            }
          }
          return s;
        });

    MstcRow row;
    row.n = n;
    row.b_n = b_n;
    MomentAccumulator ratio_acc, mstc_acc;
    for (std::size_t rep = 0; rep < samples.size(); ++rep) {
      const auto& s = samples[rep];
      ratio_acc.add(s.ratio);
      mstc_acc.add(s.mstc);
      row.u_tot.record(s.u_tot);
      row.occupied.record(s.all_occupied);
      row.sandwich_checked += as_int(s.sandwich_checked);
      row.sandwich_violations += as_int(s.sandwich_checked && !s.sandwich_ok);
      row.dominance_violations += as_int(!s.dominance_ok);
      if (layout.well_separated()) row.locality_violations += s.locality_violations;
      result.raw.rows.push_back({n, static_cast<std::int64_t>(rep), s.count, s.mstc, b_n, s.ratio,
                                 s.lower, s.upper_len, s.upper_bound, s.small_city_correction,
                                 as_int(s.all_occupied), as_int(s.u_tot), as_int(s.sandwich_ok),
                                 as_int(s.dominance_ok), s.locality_violations});
    }
    row.ratio = ratio_acc.estimate();
    row.mstc = mstc_acc.estimate();
    const double lo = row.ratio.mean * (1.0 - kBandHalfWidth);
    const double hi = row.ratio.mean * (1.0 + kBandHalfWidth);
    std::int64_t inside = 0;
    for (const auto& s : samples) inside += as_int(s.ratio >= lo && s.ratio <= hi);
    row.band_frequency = static_cast<double>(inside) / static_cast<double>(samples.size());
    row.samples = std::move(samples);

    result.aggregate.rows.push_back(
        {n, cfg.replications, b_n, row.ratio.mean, row.ratio.variance, row.ratio.stddev(),
         row.ratio.stderr_mean, row.ratio.min, row.ratio.max, row.mstc.mean, row.mstc.variance, lo,
         hi, row.band_frequency, row.u_tot.frequency(), row.occupied.frequency(),
         row.sandwich_checked, row.sandwich_violations, row.dominance_violations,
         row.locality_violations});
    result.rows.push_back(std::move(row));
  }

  double lo_mean = std::numeric_limits<double>::infinity();
  double hi_mean = -lo_mean;
  result.std_strictly_decreasing = true;
  std::int64_t sandwich_violations = 0;
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    lo_mean = std::min(lo_mean, result.rows[k].ratio.mean);
    hi_mean = std::max(hi_mean, result.rows[k].ratio.mean);
    sandwich_violations += result.rows[k].sandwich_violations;
    if (k > 0 && !(result.rows[k].ratio.stddev() < result.rows[k - 1].ratio.stddev())) {
      result.std_strictly_decreasing = false;
    }
  }
  result.mean_ratio_spread = (hi_mean - lo_mean) / lo_mean;
  result.summary = {{"mean_ratio_spread", result.mean_ratio_spread},
                    {"std_strictly_decreasing", result.std_strictly_decreasing ? 1.0 : 0.0},
                    {"sandwich_violations", static_cast<double>(sandwich_violations)},
                    {"band_half_width", kBandHalfWidth},
                    {"lower_bound_enabled", lower_enabled ? 1.0 : 0.0}};
  return result;
}

// ---- city-moments ------------------------------------------------------

CityMomentsResult run_city_moment_lemmas(const ExperimentConfig& cfg, const RunOptions& opts) {
  check_grid(cfg);
  const CityLayout& layout = cfg.layout_or_unit();
  const std::size_t cities = layout.size();
  if (cities < 2) throw Error(ErrorCode::kInvalidArgument, "city moments need at least 2 cities");

  struct Trial {
    std::vector<std::int64_t> bin_counts, poi_counts;
    std::vector<double> bin, poi;
  };

  CityMomentsResult result;
  result.raw.columns = {"n", "rep", "process", "city", "count", "r_l"};
  result.aggregate.columns = {"n",
                              "reps",
                              "cities",
                              "scale",
                              "normalized_min",
                              "normalized_mean",
                              "normalized_max",
                              "second_moment_max",
                              "pairs",
                              "mean_abs_correlation",
                              "pairs_within_3sigma",
                              "max_abs_gap_z",
                              "cities_gap_within_5"};
  const auto pairs = pick_pairs(cities, cfg.correlation_pairs,
                                derive_seed(cfg.master_seed, {label_hash("pairs")}));
  std::vector<double> log_n, log_mean;

  for (const auto n : cfg.n_values) {
    const auto trials = parallel_map(
        static_cast<std::size_t>(cfg.replications), opts.threads, [&](std::size_t rep) {
          const auto nn = static_cast<std::uint64_t>(n);
          Trial t;
          const auto bin = sample_binomial_cities(
              n, layout, cfg.density, derive_seed(cfg.master_seed, {label_hash("binomial"), nn, rep}));
          const auto poi = sample_poisson_cities(
              n, layout, cfg.density, derive_seed(cfg.master_seed, {label_hash("poisson"), nn, rep}));
          t.bin_counts = city_counts(bin.points, layout);
          t.poi_counts = city_counts(poi.points, layout);
          t.bin = city_lengths(bin.points, layout);
          t.poi = city_lengths(poi.points, layout);
          return t;
        });

    CityMomentsRow row;
    row.n = n;
    row.scale = layout.r() * std::sqrt(static_cast<double>(n) / static_cast<double>(cities));
    std::vector<MomentAccumulator> bin_acc(cities), poi_acc(cities), sq_acc(cities);
    for (std::size_t rep = 0; rep < trials.size(); ++rep) {
      const auto& t = trials[rep];
      for (std::size_t l = 0; l < cities; ++l) {
        bin_acc[l].add(t.bin[l]);
        poi_acc[l].add(t.poi[l]);
        sq_acc[l].add(t.bin[l] * t.bin[l]);
      }
      for (std::size_t l = 0; l < cities; ++l) {
        result.raw.rows.push_back({n, static_cast<std::int64_t>(rep), std::string("binomial"),
                                   static_cast<std::int64_t>(l), t.bin_counts[l], t.bin[l]});
      }
      for (std::size_t l = 0; l < cities; ++l) {
        result.raw.rows.push_back({n, static_cast<std::int64_t>(rep), std::string("poisson"),
                                   static_cast<std::int64_t>(l), t.poi_counts[l], t.poi[l]});
      }
    }

    double grand_mean = 0.0;
    std::int64_t gap_ok = 0;
    double max_gap = 0.0;
    double second_max = 0.0;
    for (std::size_t l = 0; l < cities; ++l) {
      row.binomial.push_back(bin_acc[l].estimate());
      row.poisson.push_back(poi_acc[l].estimate());
      const auto& b = row.binomial.back();
      const auto& p = row.poisson.back();
      row.normalized.push_back(b.mean / row.scale);
      row.second_moment.push_back(sq_acc[l].estimate().mean / (row.scale * row.scale));
      second_max = std::max(second_max, row.second_moment.back());
      grand_mean += b.mean / static_cast<double>(cities);
      const double se = std::hypot(b.stderr_mean, p.stderr_mean);
      const double z = se > 0.0 ? (b.mean - p.mean) / se : (b.mean == p.mean ? 0.0 : kNaN);
      row.gap_z.push_back(z);
      gap_ok += as_int(std::abs(z) <= 5.0);
      max_gap = std::max(max_gap, std::abs(z));
    }
    row.normalized_min = *std::min_element(row.normalized.begin(), row.normalized.end());
    row.normalized_max = *std::max_element(row.normalized.begin(), row.normalized.end());
    row.cities_gap_within_5 = static_cast<double>(gap_ok) / static_cast<double>(cities);

    // Fisher z of each pair's correlation against zero.
    const double reps = static_cast<double>(trials.size());
    std::vector<double> xa(trials.size()), xb(trials.size());
    std::int64_t within = 0;
    double abs_sum = 0.0;
    row.pairs = pairs;
    for (const auto& [a, b] : pairs) {
      for (std::size_t rep = 0; rep < trials.size(); ++rep) {
        xa[rep] = trials[rep].bin[a];
        xb[rep] = trials[rep].bin[b];
      }
      const double rho = correlation(xa, xb);
      row.pair_correlation.push_back(rho);
      abs_sum += std::abs(rho);
      const double fisher = reps > 3.0 ? std::atanh(std::clamp(rho, -0.999999, 0.999999)) * std::sqrt(reps - 3.0)
                                       : 0.0;
      within += as_int(std::abs(fisher) <= 3.0);
    }
    row.mean_abs_correlation = pairs.empty() ? 0.0 : abs_sum / static_cast<double>(pairs.size());
    row.pairs_within_3sigma =
        pairs.empty() ? 1.0 : static_cast<double>(within) / static_cast<double>(pairs.size());

    if (grand_mean > 0.0) {
      log_n.push_back(std::log(static_cast<double>(n)));
      log_mean.push_back(std::log(grand_mean));
    }
    const double norm_mean =
        std::accumulate(row.normalized.begin(), row.normalized.end(), 0.0) / static_cast<double>(cities);
    result.aggregate.rows.push_back({n, cfg.replications, static_cast<std::int64_t>(cities), row.scale,
                                     row.normalized_min, norm_mean, row.normalized_max, second_max,
                                     static_cast<std::int64_t>(pairs.size()), row.mean_abs_correlation,
                                     row.pairs_within_3sigma, max_gap, row.cities_gap_within_5});
    result.rows.push_back(std::move(row));
  }
  result.scaling_slope = log_n.size() >= 2 ? ols_slope(log_n, log_mean) : kNaN;
  double norm_lo = std::numeric_limits<double>::infinity();
  double norm_hi = 0.0;
  for (const auto& row : result.rows) {
    norm_lo = std::min(norm_lo, row.normalized_min);
    norm_hi = std::max(norm_hi, row.normalized_max);
  }
  result.summary = {{"scaling_slope", result.scaling_slope},
                    {"normalized_min", norm_lo},
                    {"normalized_max", norm_hi},
                    {"correlation_pairs", static_cast<double>(pairs.size())}};
  return result;
}

// ---- unconstrained -----------------------------------------------------

UnconstrainedResult run_unconstrained(const ExperimentConfig& cfg, const RunOptions& opts) {
  check_grid(cfg);
  if (cfg.layout && !(cfg.layout->size() == 1 && cfg.layout->r() == 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "the unconstrained experiment takes no city layout");
  }
  if (cfg.density.kind() != DensityKind::kUniform) {
    spdlog::warn("beta stabilisation is only meaningful for the uniform density");
  }
  UnconstrainedResult result;
  result.raw.columns = {"n", "rep", "mst", "ratio"};
  result.aggregate.columns = {"n",        "reps",      "mst_mean",  "mst_var",
                              "mst_stderr", "beta_hat", "beta_stderr", "max_ratio",
                              "bound_violations", "beta_rel_change"};
  std::int64_t violations = 0;
  for (const auto n : cfg.n_values) {
    const auto lengths = parallel_map(
        static_cast<std::size_t>(cfg.replications), opts.threads, [&](std::size_t rep) {
          const auto seed = derive_seed(cfg.master_seed, {label_hash("unconstrained"),
                                                          static_cast<std::uint64_t>(n), rep});
          return exact_mst(sample_unit_square(n, cfg.density, seed).points).total_len();
        });
    const double root_n = std::sqrt(static_cast<double>(n));
    UnconstrainedRow row;
    row.n = n;
    MomentAccumulator acc;
    for (std::size_t rep = 0; rep < lengths.size(); ++rep) {
      acc.add(lengths[rep]);
      row.max_ratio = std::max(row.max_ratio, lengths[rep] / root_n);
      if (lengths[rep] > 3.0 * root_n) ++row.bound_violations;
      result.raw.rows.push_back({n, static_cast<std::int64_t>(rep), lengths[rep], lengths[rep] / root_n});
    }
    row.mst = acc.estimate();
    row.beta_hat = row.mst.mean / root_n;
    row.beta_stderr = row.mst.stderr_mean / root_n;
    double rel_change = kNaN;
    if (!result.rows.empty()) {
      const double prev = result.rows.back().beta_hat;
      rel_change = std::abs(row.beta_hat - prev) / prev;
      result.beta_rel_change.push_back(rel_change);
    }
    violations += row.bound_violations;
    result.aggregate.rows.push_back({n, cfg.replications, row.mst.mean, row.mst.variance,
                                     row.mst.stderr_mean, row.beta_hat, row.beta_stderr, row.max_ratio,
                                     row.bound_violations, rel_change});
    result.rows.push_back(row);
  }
  const auto& first = result.rows.front();
  const auto& last = result.rows.back();
  result.variance_growth = first.mst.variance > 0.0 ? last.mst.variance / first.mst.variance : kNaN;
  result.polylog_benchmark =
      first.n > 1 ? std::pow(std::log(static_cast<double>(last.n)) / std::log(static_cast<double>(first.n)), 3.0)
                  : kNaN;
  result.summary = {{"variance_growth", result.variance_growth},
                    {"polylog_benchmark", result.polylog_benchmark},
                    {"bound_violations", static_cast<double>(violations)}};
  if (violations > 0) {
    throw Error(ErrorCode::kAssertionFailure,
                fmt::format("{} samples exceed MST_n <= 3 sqrt(n)", violations));
  }
  return result;
}

// ---- fine grid and one-point differences -------------------------------

FineGrid fine_grid(std::int64_t n, double M, const DensitySpec& f) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, fmt::format("fine grid needs n >= 2, got {}", n));
  if (!(M > 0.0)) throw Error(ErrorCode::kInvalidArgument, fmt::format("M must be positive, got {}", M));
  const double log_n = std::log(static_cast<double>(n));
  const double r_raw = std::sqrt(2.0 * M * log_n / static_cast<double>(n));
  FineGrid g;
  g.cells_per_side = std::max(1, static_cast<int>(std::floor(1.0 / r_raw)));
  g.r_n = 1.0 / g.cells_per_side;
  g.lower = f.eps1() * M * log_n;
  g.upper = 4.0 * f.eps2() * M * log_n;
  return g;
}

ZtotReport detect_Ztot(std::span<const Point2> points, std::int64_t n, double M, const DensitySpec& f) {
  ZtotReport report;
  report.grid = fine_grid(n, M, f);
  const int k = report.grid.cells_per_side;
  report.counts.assign(static_cast<std::size_t>(k) * k, 0);
  for (const auto& p : points) ++report.counts[cell_index(p, k)];
  const double lo = report.grid.lower;
  const double hi = report.grid.upper;
  report.holds_full = std::all_of(report.counts.begin(), report.counts.end(), [&](std::int64_t c) {
    return lo <= static_cast<double>(c) && static_cast<double>(c) <= hi;
  });
  // Removing a node changes only its own square's count, by one.
  report.holds_leave_one_out = std::all_of(report.counts.begin(), report.counts.end(), [&](std::int64_t c) {
    const auto in = [&](std::int64_t v) { return lo <= static_cast<double>(v) && static_cast<double>(v) <= hi; };
    return in(c) && (c == 0 || in(c - 1));
  });
  return report;
}

bool ztot_leave_one_out_exact(std::span<const Point2> points, std::int64_t n, double M,
                              const DensitySpec& f) {
  const auto grid = fine_grid(n, M, f);
  const int k = grid.cells_per_side;
  for (std::size_t j = 0; j < points.size(); ++j) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k) * k, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      if (p != j) ++counts[cell_index(points[p], k)];
    }
    for (const auto c : counts) {
      if (static_cast<double>(c) < grid.lower || static_cast<double>(c) > grid.upper) return false;
    }
  }
  return true;
}

OnePointResult run_one_point_diff(const ExperimentConfig& cfg, const RunOptions& opts) {
  check_grid(cfg);
  struct Trial {
    std::int64_t j = 0;
    bool z_full = false;
    bool z_loo = false;
    bool mate = false;
    double plus = 0.0;
    double minus_j = 0.0;
    double minus_last = 0.0;
    std::int64_t h1 = 0;
  };

  OnePointResult result;
  result.raw.columns = {"n",       "rep",        "j",        "r_n",           "ztot_full",
                        "ztot_loo", "mate",       "mst_plus", "mst_minus_j",   "mst_minus_last",
                        "add_diff", "removal_diff", "add_violation", "h1_violations"};
  result.aggregate.columns = {"n",
                              "reps",
                              "r_n",
                              "cells_per_side",
                              "band_lo",
                              "band_hi",
                              "ztot_full_frequency",
                              "ztot_loo_frequency",
                              "add_checked",
                              "add_violations",
                              "mate_checked",
                              "mate_violations",
                              "h1_violations",
                              "abs_diff_mean",
                              "abs_diff_stderr",
                              "shape",
                              "abs_diff_over_shape",
                              "removal_ratio_q50",
                              "removal_ratio_q90",
                              "removal_ratio_q99",
                              "removal_ratio_max"};

  for (const auto n : cfg.n_values) {
    if (n < 2) throw Error(ErrorCode::kInvalidArgument, "one-point differences need n >= 2");
    const auto grid = fine_grid(n, cfg.M, cfg.density);
    const double add_bound = grid.r_n * std::sqrt(2.0);
    const double h1_bound = 20.0 * grid.r_n * std::sqrt(2.0);
    const auto trials = parallel_map(
        static_cast<std::size_t>(cfg.replications), opts.threads, [&](std::size_t rep) {
          const auto nn = static_cast<std::uint64_t>(n);
          const auto pts = sample_unit_square(n + 1, cfg.density,
                                              derive_seed(cfg.master_seed, {label_hash("one-point"), nn, rep}))
                               .points;
          Philox4x32 pick(derive_seed(cfg.master_seed, {label_hash("one-point-j"), nn, rep}));
          Trial t;
          t.j = std::min<std::int64_t>(n, static_cast<std::int64_t>(pick.uniform01() * static_cast<double>(n + 1)));
          const auto z = detect_Ztot(pts, n, cfg.M, cfg.density);
          t.z_full = z.holds_full;
          t.z_loo = cfg.exact_leave_one_out ? ztot_leave_one_out_exact(pts, n, cfg.M, cfg.density)
                                            : z.holds_leave_one_out;
          t.mate = z.counts[cell_index(pts[static_cast<std::size_t>(t.j)], grid.cells_per_side)] >= 2;
          const WeightedTree plus = exact_mst(pts);
          t.plus = plus.total_len();
          t.minus_j = exact_mst(without(pts, static_cast<std::size_t>(t.j))).total_len();
          t.minus_last = t.j == n ? t.minus_j : exact_mst(without(pts, static_cast<std::size_t>(n))).total_len();
          if (t.z_loo) {
            for (const auto& e : plus.edges()) t.h1 += as_int(e.len > h1_bound);
          }
          return t;
        });

    OnePointRow row;
    row.n = n;
    row.grid = grid;
    MomentAccumulator abs_diff;
    std::vector<double> removal;
    removal.reserve(trials.size());
    const double log_n = std::log(static_cast<double>(n));
    for (std::size_t rep = 0; rep < trials.size(); ++rep) {
      const auto& t = trials[rep];
      const double add = t.plus - t.minus_j;
      const bool violates = add > add_bound;
      row.ztot_full.record(t.z_full);
      row.ztot_loo.record(t.z_loo);
      if (t.z_loo) {
        ++row.add_checked;
        row.add_violations += as_int(violates);
        row.h1_violations += t.h1;
      }
      if (t.mate) {
        ++row.mate_checked;
        row.mate_violations += as_int(violates);
      }
      abs_diff.add(std::abs(t.plus - t.minus_last));
      removal.push_back((t.minus_j - t.plus) / (grid.r_n * log_n));
      result.raw.rows.push_back({n, static_cast<std::int64_t>(rep), t.j, grid.r_n, as_int(t.z_full),
                                 as_int(t.z_loo), as_int(t.mate), t.plus, t.minus_j, t.minus_last, add,
                                 t.minus_j - t.plus, as_int(violates), t.h1});
    }
    row.abs_diff_last = abs_diff.estimate();
    row.shape = std::pow(log_n, 1.5) / std::sqrt(static_cast<double>(n));
    row.removal_q50 = quantile(removal, 0.5);
    row.removal_q90 = quantile(removal, 0.9);
    row.removal_q99 = quantile(removal, 0.99);
    row.removal_max = *std::max_element(removal.begin(), removal.end());
    result.aggregate.rows.push_back(
        {n, cfg.replications, grid.r_n, static_cast<std::int64_t>(grid.cells_per_side), grid.lower,
         grid.upper, row.ztot_full.frequency(), row.ztot_loo.frequency(), row.add_checked,
         row.add_violations, row.mate_checked, row.mate_violations, row.h1_violations,
         row.abs_diff_last.mean, row.abs_diff_last.stderr_mean, row.shape,
         row.abs_diff_last.mean / row.shape, row.removal_q50, row.removal_q90, row.removal_q99,
         row.removal_max});
    result.rows.push_back(std::move(row));
  }
  std::int64_t add_violations = 0;
  std::int64_t h1 = 0;
  for (const auto& row : result.rows) {
    add_violations += row.add_violations;
    h1 += row.h1_violations;
  }
  result.summary = {{"M", cfg.M},
                    {"add_violations", static_cast<double>(add_violations)},
                    {"h1_violations", static_cast<double>(h1)}};
  return result;
}

double poisson_pmf_at_mean(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, fmt::format("poisson_pmf_at_mean needs n >= 1, got {}", n));
  const double x = static_cast<double>(n);
  return std::exp(-x + x * std::log(x) - std::lgamma(x + 1.0));
}

ExperimentTables run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto kind = parse_experiment_kind(cfg.experiment);
  if (!kind) {
    throw Error(ErrorCode::kUnknownExperiment, fmt::format("unknown experiment '{}'", cfg.experiment));
  }
  switch (*kind) {
    case ExperimentKind::kMstcScaling:
      return run_mstc_scaling(cfg, opts);
    case ExperimentKind::kCityMoments:
      return run_city_moment_lemmas(cfg, opts);
    case ExperimentKind::kUnconstrained:
      return run_unconstrained(cfg, opts);
    case ExperimentKind::kOnePointDiff:
      return run_one_point_diff(cfg, opts);
  }
  throw Error(ErrorCode::kUnknownExperiment, fmt::format("unknown experiment '{}'", cfg.experiment));
}

}  // namespace citymst
