#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citymst/geom.hpp"
#include "citymst/io.hpp"
#include "citymst/sampling.hpp"
#include "citymst/stats.hpp"

namespace citymst {

enum class ExperimentKind { kMstcScaling, kCityMoments, kUnconstrained, kOnePointDiff };

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

struct ExperimentConfig {
  std::string experiment = "mstc-scaling";
  std::vector<std::int64_t> n_values;
  std::optional<CityLayout> layout;  // nullopt: nodes over the whole unit square
  DensitySpec density = DensitySpec::uniform();
  std::int64_t replications = 100;
  std::uint64_t master_seed = 0;
  double M = 1.0;  // occupancy constant of the fine grid
  std::string out;
  bool raw = false;               // one CSV row per (n, replication) instead of per n
  bool lower_bound = true;        // cleared when s <= r sqrt(2)
  std::size_t correlation_pairs = 100;
  bool exact_leave_one_out = false;
  std::vector<std::string> warnings;

  const CityLayout& layout_or_unit() const;
};

struct RunOptions {
  unsigned threads = 1;
};

using Summary = std::vector<std::pair<std::string, double>>;

// Common shape of every experiment's output.
struct ExperimentTables {
  Table raw;
  Table aggregate;
  Summary summary;
};

// ---- city-constrained MST scaling -------------------------------------

struct MstcSample {
  std::int64_t count = 0;
  double mstc = 0.0;
  double ratio = 0.0;  // mstc / b_n
  double lower = 0.0;  // NaN when the lower bound is disabled
  double upper_len = 0.0;
  double upper_bound = 0.0;
  double small_city_correction = 0.0;  // MST lengths of cities with <= 2 nodes
  bool all_occupied = false;
  bool u_tot = false;
  bool sandwich_checked = false;
  bool sandwich_ok = true;
  bool dominance_ok = true;  // mstc <= upper_len <= upper_bound
  std::int64_t locality_violations = 0;
};

struct MstcRow {
  std::int64_t n = 0;
  double b_n = 0.0;
  MomentEstimate ratio;
  MomentEstimate mstc;
  double band_frequency = 0.0;  // P(|ratio - mean| <= 5% of mean)
  EventStats u_tot{"U_tot"};
  EventStats occupied{"all_occupied"};
  std::int64_t sandwich_checked = 0;
  std::int64_t sandwich_violations = 0;
  std::int64_t dominance_violations = 0;
  std::int64_t locality_violations = 0;
  std::vector<MstcSample> samples;
};

struct MstcScalingResult : ExperimentTables {
  std::vector<MstcRow> rows;
  double mean_ratio_spread = 0.0;  // (max - min) / min of per-n mean ratios
  bool std_strictly_decreasing = false;
};

MstcScalingResult run_mstc_scaling(const ExperimentConfig& cfg, const RunOptions& opts);

// ---- per-city moment lemmas ------------------------------------------

struct CityMomentsRow {
  std::int64_t n = 0;
  double scale = 0.0;  // r sqrt(n / N)
  std::vector<MomentEstimate> binomial;  // R_l per city
  std::vector<MomentEstimate> poisson;   // R_l^(P) per city
  std::vector<double> normalized;        // E R_l / scale
  std::vector<double> second_moment;     // E R_l^2 / scale^2
  double normalized_min = 0.0;
  double normalized_max = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> pair_correlation;
  double mean_abs_correlation = 0.0;
  double pairs_within_3sigma = 0.0;
  std::vector<double> gap_z;  // (E R_l - E_0 R_l^(P)) / combined stderr
  double cities_gap_within_5 = 0.0;
};

struct CityMomentsResult : ExperimentTables {
  std::vector<CityMomentsRow> rows;
  double scaling_slope = 0.0;  // d log(mean E R_l) / d log n
};

CityMomentsResult run_city_moment_lemmas(const ExperimentConfig& cfg, const RunOptions& opts);

// ---- unconstrained MST ------------------------------------------------

struct UnconstrainedRow {
  std::int64_t n = 0;
  MomentEstimate mst;
  double beta_hat = 0.0;  // E MST_n / sqrt(n)
  double beta_stderr = 0.0;
  double max_ratio = 0.0;  // max MST_n / sqrt(n)
  std::int64_t bound_violations = 0;
};

struct UnconstrainedResult : ExperimentTables {
  std::vector<UnconstrainedRow> rows;
  double variance_growth = 0.0;     // var(MST at max n) / var(MST at min n)
  double polylog_benchmark = 0.0;   // (log n_max / log n_min)^3
  std::vector<double> beta_rel_change;  // |beta(n_k) - beta(n_{k-1})| / beta(n_{k-1})
};

// Throws kAssertionFailure if any sample has MST_n > 3 sqrt(n).
UnconstrainedResult run_unconstrained(const ExperimentConfig& cfg, const RunOptions& opts);

// ---- fine-grid occupancy and one-point differences --------------------

struct FineGrid {
  int cells_per_side = 1;
  double r_n = 1.0;
  double lower = 0.0;  // eps1 M log n
  double upper = 0.0;  // 4 eps2 M log n
};

// Grid of side r_n = 1 / floor(1 / sqrt(2 M log n / n)), so that
// r_n^2 >= 2 M log n / n.
FineGrid fine_grid(std::int64_t n, double M, const DensitySpec& f);

struct ZtotReport {
  FineGrid grid;
  std::vector<std::int64_t> counts;  // row-major, cells_per_side^2
  bool holds_full = false;           // every count of the full set in band
  bool holds_leave_one_out = false;  // every count stays in band after removing any one point
};

// `points` holds the n + 1 nodes; n sets the band and grid.
ZtotReport detect_Ztot(std::span<const Point2> points, std::int64_t n, double M,
                       const DensitySpec& f);

// Literal intersection over all leave-one-out sets, O(n * cells).
bool ztot_leave_one_out_exact(std::span<const Point2> points, std::int64_t n, double M,
                              const DensitySpec& f);

struct OnePointRow {
  std::int64_t n = 0;
  FineGrid grid;
  EventStats ztot_full{"Z_tot(full)"};
  EventStats ztot_loo{"Z_tot(leave-one-out)"};
  std::int64_t add_checked = 0;     // trials with Z_tot
  std::int64_t add_violations = 0;  // MST_{n+1} - MST_n(j) > r_n sqrt(2) under Z_tot
  std::int64_t mate_checked = 0;    // trials where X_j shares its grid square
  std::int64_t mate_violations = 0;
  std::int64_t h1_violations = 0;   // MST_{n+1} edges longer than 20 sqrt(2) r_n under Z_tot
  MomentEstimate abs_diff_last;     // |MST_{n+1} - MST_n|
  double shape = 0.0;               // (log n)^{3/2} / sqrt(n)
  double removal_q50 = 0.0;         // quantiles of (MST_n(j) - MST_{n+1}) / (r_n log n)
  double removal_q90 = 0.0;
  double removal_q99 = 0.0;
  double removal_max = 0.0;
};

struct OnePointResult : ExperimentTables {
  std::vector<OnePointRow> rows;
};

OnePointResult run_one_point_diff(const ExperimentConfig& cfg, const RunOptions& opts);

// e^{-n} n^n / n!, evaluated through lgamma.
double poisson_pmf_at_mean(std::int64_t n);

// Routes on cfg.experiment. Throws kUnknownExperiment.
ExperimentTables run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace citymst
