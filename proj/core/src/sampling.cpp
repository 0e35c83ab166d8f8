#include "citymst/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "citymst/error.hpp"
#include "citymst/rng.hpp"

namespace citymst {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kStallTries = 1'000'000;

// integral of cos(2 pi t) over [a, a + w]
double cos_integral(double a, double w) {
  return (std::sin(kTwoPi * (a + w)) - std::sin(kTwoPi * a)) / kTwoPi;
}

class CitySampler {
 public:
  CitySampler(const CityLayout& layout, const DensitySpec& f, std::uint64_t seed)
      : layout_(layout), f_(f), rng_(seed) {
    const auto p = city_probabilities(layout, f);
    cumulative_.resize(p.size());
    std::partial_sum(p.begin(), p.end(), cumulative_.begin());
  }

  Philox4x32& rng() { return rng_; }

  std::uint32_t pick_city() {
    const double u = rng_.uniform01() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto l = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<std::uint32_t>(std::min(l, cumulative_.size() - 1));
  }

  // Rejection against f / eps2 within one square.
  Point2 draw_in(std::size_t city) {
    const AxisSquare& sq = layout_.square(city);
    const double ceiling = f_.eps2();
    for (std::int64_t tries = 0; tries < kStallTries; ++tries) {
      const Point2 p{sq.origin.x + sq.side * rng_.uniform01(),
                     sq.origin.y + sq.side * rng_.uniform01()};
      if (!sq.contains(p)) continue;  // rounding onto the open upper edge
      if (f_.kind() == DensityKind::kUniform) return p;
      if (rng_.uniform01() * ceiling < f_(p)) return p;
    }
    throw Error(ErrorCode::kRejectionStall,
                fmt::format("no acceptance in {} proposals in city {}", kStallTries, city));
  }

 private:
  const CityLayout& layout_;
  const DensitySpec& f_;
  Philox4x32 rng_;
  std::vector<double> cumulative_;
};

// Exact coordinate ties have probability zero, but the strip construction
// assumes distinct coordinates, so any tie is redrawn in the same city.
void resample_ties(std::vector<Point2>& points, const std::vector<std::uint32_t>& cities,
                   CitySampler& sampler) {
  if (points.size() < 2) return;
  std::vector<std::uint32_t> order(points.size());
  for (;;) {
    bool clean = true;
    for (int axis = 0; axis < 2; ++axis) {
      std::iota(order.begin(), order.end(), 0u);
      const auto coord = [&](std::uint32_t i) { return axis == 0 ? points[i].x : points[i].y; };
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return coord(a) < coord(b) || (coord(a) == coord(b) && a < b);
      });
      for (std::size_t k = 1; k < order.size(); ++k) {
        if (coord(order[k]) == coord(order[k - 1])) {
          const auto victim = order[k];
          spdlog::warn("coordinate tie at point {}; redrawing it", victim);
          points[victim] = sampler.draw_in(cities[victim]);
          clean = false;
        }
      }
    }
    if (clean) return;
  }
}

}  // namespace

DensitySpec DensitySpec::cosine(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cosine density needs 0 <= delta < 1, got {}", delta));
  }
  return DensitySpec(DensityKind::kCosine, delta);
}

double DensitySpec::operator()(Point2 p) const {
  if (kind_ == DensityKind::kUniform) return 1.0;
  return 1.0 + delta_ * std::cos(kTwoPi * p.x) * std::cos(kTwoPi * p.y);
}

double DensitySpec::mass(const AxisSquare& sq) const {
  const double area = sq.side * sq.side;
  if (kind_ == DensityKind::kUniform) return area;
  return area + delta_ * cos_integral(sq.origin.x, sq.side) * cos_integral(sq.origin.y, sq.side);
}

std::string_view to_string(PointProcess process) {
  return process == PointProcess::kBinomial ? "binomial" : "poisson";
}

std::vector<double> city_probabilities(const CityLayout& layout, const DensitySpec& f) {
  std::vector<double> p;
  p.reserve(layout.size());
  for (const auto& sq : layout.squares()) p.push_back(f.mass(sq));
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  return p;
}

SampleBatch sample_binomial_cities(std::int64_t n, const CityLayout& layout,
                                   const DensitySpec& f, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "binomial sample needs n >= 1");
  CitySampler sampler(layout, f, seed);
  std::vector<Point2> points(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> cities(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    cities[k] = sampler.pick_city();
    points[k] = sampler.draw_in(cities[k]);
  }
  resample_ties(points, cities, sampler);
  return {std::move(points), PointProcess::kBinomial, seed, n, layout};
}

SampleBatch sample_poisson_cities(std::int64_t n_mean, const CityLayout& layout,
                                  const DensitySpec& f, std::uint64_t seed) {
  if (n_mean < 1) throw Error(ErrorCode::kInvalidArgument, "Poisson sample needs mean >= 1");
  CitySampler sampler(layout, f, seed);
  const auto p = city_probabilities(layout, f);
  std::vector<Point2> points;
  std::vector<std::uint32_t> cities;
  points.reserve(static_cast<std::size_t>(n_mean) + 4 * static_cast<std::size_t>(std::sqrt(n_mean)) + 16);
  for (std::size_t l = 0; l < p.size(); ++l) {
    std::poisson_distribution<std::int64_t> count_dist(static_cast<double>(n_mean) * p[l]);
    const auto count = count_dist(sampler.rng());
    for (std::int64_t k = 0; k < count; ++k) {
      cities.push_back(static_cast<std::uint32_t>(l));
      points.push_back(sampler.draw_in(l));
    }
  }
  resample_ties(points, cities, sampler);
  return {std::move(points), PointProcess::kPoisson, seed, n_mean, layout};
}

SampleBatch sample_unit_square(std::int64_t n, const DensitySpec& f, std::uint64_t seed) {
  return sample_binomial_cities(n, CityLayout::unit_square(), f, seed);
}

std::vector<std::vector<std::uint32_t>> city_members(std::span<const Point2> points,
                                                     const CityLayout& layout) {
  std::vector<std::vector<std::uint32_t>> members(layout.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto l = layout.city_of(points[k]);
    if (!l) {
      throw Error(ErrorCode::kStrayPoint,
                  fmt::format("point {} ({}, {}) lies in no city", k, points[k].x, points[k].y));
    }
    members[*l].push_back(static_cast<std::uint32_t>(k));
  }
  return members;
}

std::vector<std::int64_t> city_counts(std::span<const Point2> points, const CityLayout& layout) {
  std::vector<std::int64_t> counts(layout.size(), 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto l = layout.city_of(points[k]);
    if (!l) {
      throw Error(ErrorCode::kStrayPoint,
                  fmt::format("point {} ({}, {}) lies in no city", k, points[k].x, points[k].y));
    }
    ++counts[*l];
  }
  return counts;
}

OccupancyReport occupancy_event_U(std::span<const std::int64_t> counts, std::int64_t n,
                                  std::size_t cities, const DensitySpec& f) {
  if (counts.size() != cities || cities == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("expected {} city counts, got {}", cities, counts.size()));
  }
  OccupancyReport report;
  const double big_n = static_cast<double>(cities);
  report.lower = f.eta1() * static_cast<double>(n) / (2.0 * big_n);
  report.upper = 2.0 * f.eta2() * static_cast<double>(n) / big_n;
  report.all = true;
  report.in_band.reserve(counts.size());
  for (const auto c : counts) {
    const auto v = static_cast<double>(c);
    const bool ok = report.lower <= v && v <= report.upper;
    report.in_band.push_back(ok);
    report.all = report.all && ok;
  }
  return report;
}

}  // namespace citymst
