#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace citymst {

struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1) sample variance
  double stderr_mean = 0.0;
  std::int64_t count = 0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  double stddev() const;
};

// One-pass (Welford) accumulator. merge() combines partial accumulators
// (Chan et al.); merging in a fixed order gives a fixed result.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);
  MomentEstimate estimate() const;
  std::int64_t count() const { return count_; }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

MomentEstimate moments(std::span<const double> values);

struct EventStats {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t occurrences = 0;

  double frequency() const {
    return trials == 0 ? 0.0 : static_cast<double>(occurrences) / static_cast<double>(trials);
  }
  void record(bool happened) {
    ++trials;
    occurrences += happened ? 1 : 0;
  }
};

// Pearson sample correlation; 0 when either side has zero variance.
double correlation(std::span<const double> x, std::span<const double> y);

// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace citymst
