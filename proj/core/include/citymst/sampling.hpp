#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "citymst/geom.hpp"

namespace citymst {

enum class DensityKind { kUniform, kCosine };

// Bounded density on the unit square with unit mass. The cosine family is
// f(x, y) = 1 + delta * cos(2 pi x) * cos(2 pi y), whose integral over the
// unit square is exactly 1 and whose range is [1 - delta, 1 + delta].
class DensitySpec {
 public:
  static DensitySpec uniform() { return DensitySpec(DensityKind::kUniform, 0.0); }
  // Throws kInvalidArgument unless 0 <= delta < 1.
  static DensitySpec cosine(double delta);

  DensityKind kind() const { return kind_; }
  double delta() const { return delta_; }

  double operator()(Point2 p) const;

  double eps1() const { return 1.0 - delta_; }
  double eps2() const { return 1.0 + delta_; }
  double eta1() const { return eps1() / eps2(); }
  double eta2() const { return eps2() / eps1(); }

  // Closed-form integral of f over a square.
  double mass(const AxisSquare& square) const;

 private:
  DensitySpec(DensityKind kind, double delta) : kind_(kind), delta_(delta) {}

  DensityKind kind_;
  double delta_;
};

enum class PointProcess { kBinomial, kPoisson };

std::string_view to_string(PointProcess process);

struct SampleBatch {
  std::vector<Point2> points;
  PointProcess process = PointProcess::kBinomial;
  std::uint64_t seed = 0;
  std::int64_t n_target = 0;
  std::optional<CityLayout> layout;
};

// p_l: the probability that a draw from the city-restricted density lands in
// city l.
std::vector<double> city_probabilities(const CityLayout& layout, const DensitySpec& f);

// n i.i.d. draws from f restricted and renormalised to the selected cities.
SampleBatch sample_binomial_cities(std::int64_t n, const CityLayout& layout,
                                   const DensitySpec& f, std::uint64_t seed);

// Poisson process with intensity n_mean * g: independent Poisson(n_mean * p_l)
// counts per city, then i.i.d. positions within each city.
SampleBatch sample_poisson_cities(std::int64_t n_mean, const CityLayout& layout,
                                  const DensitySpec& f, std::uint64_t seed);

// Binomial draws over the whole unit square.
SampleBatch sample_unit_square(std::int64_t n, const DensitySpec& f, std::uint64_t seed);

// Per-city node counts N_l. Throws kStrayPoint if a point is in no city.
std::vector<std::int64_t> city_counts(std::span<const Point2> points, const CityLayout& layout);

// Point indices grouped by city, ascending within each city.
std::vector<std::vector<std::uint32_t>> city_members(std::span<const Point2> points,
                                                     const CityLayout& layout);

struct OccupancyReport {
  std::vector<bool> in_band;  // U_l per city
  bool all = false;           // U_tot
  double lower = 0.0;         // eta1 * n / (2N)
  double upper = 0.0;         // 2 * eta2 * n / N
};

// Occupancy events U_l = {eta1 n / (2N) <= N_l <= 2 eta2 n / N}.
OccupancyReport occupancy_event_U(std::span<const std::int64_t> counts, std::int64_t n,
                                  std::size_t cities, const DensitySpec& f);

}  // namespace citymst
