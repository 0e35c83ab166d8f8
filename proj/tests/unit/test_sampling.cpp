#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "citymst/error.hpp"
#include "citymst/rng.hpp"
#include "citymst/sampling.hpp"
#include "citymst/stats.hpp"
#include "oracles.hpp"

using namespace citymst;

TEST(Density, CosineBoundsAndUnitMass) {
  const auto f = DensitySpec::cosine(0.5);
  EXPECT_DOUBLE_EQ(f.eps1(), 0.5);
  EXPECT_DOUBLE_EQ(f.eps2(), 1.5);
  EXPECT_DOUBLE_EQ(f.eta1(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.eta2(), 3.0);
  EXPECT_NEAR(f.mass(AxisSquare::unit()), 1.0, 1e-15);
  const auto pts = oracle::uniform_points(10000, 2);
  for (const auto& p : pts) {
    ASSERT_GE(f(p), f.eps1() - 1e-15);
    ASSERT_LE(f(p), f.eps2() + 1e-15);
  }
  // Midpoint rule over a 400 x 400 grid.
  double sum = 0.0;
  for (int i = 0; i < 400; ++i) {
    for (int j = 0; j < 400; ++j) sum += f({(i + 0.5) / 400, (j + 0.5) / 400});
  }
  EXPECT_NEAR(sum / (400.0 * 400.0), 1.0, 1e-9);
}

TEST(Density, MassMatchesClosedFormOracle) {
  const auto f = DensitySpec::cosine(0.3);
  const AxisSquare sq{{0.13, 0.61}, 0.2};
  EXPECT_NEAR(f.mass(sq), oracle::cosine_mass(0.3, 0.13, 0.33, 0.61, 0.81), 1e-14);
}

TEST(Density, RejectsAmplitudeOutsideRange) {
  EXPECT_THROW(DensitySpec::cosine(1.0), Error);
  EXPECT_THROW(DensitySpec::cosine(-0.1), Error);
  EXPECT_NO_THROW(DensitySpec::cosine(0.0));
}

TEST(CityProbabilities, UniformIsSymmetric) {
  for (const auto& layout : {CityLayout::all_cities(0.1, 0.2),
                             CityLayout::with_selection(0.01, 0.056, {{0, 0}, {0, 1}, {1, 1}})}) {
    const auto p = city_probabilities(layout, DensitySpec::uniform());
    for (const double q : p) EXPECT_NEAR(q, 1.0 / static_cast<double>(layout.size()), 1e-14);
  }
}

TEST(CityProbabilities, CosineMatchesOracle) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  const auto p = city_probabilities(layout, DensitySpec::cosine(0.5));
  double total = 0.0;
  std::vector<double> mass;
  for (const auto& sq : layout.squares()) {
    mass.push_back(oracle::cosine_mass(0.5, sq.origin.x, sq.origin.x + sq.side, sq.origin.y,
                                       sq.origin.y + sq.side));
    total += mass.back();
  }
  for (std::size_t l = 0; l < p.size(); ++l) EXPECT_NEAR(p[l], mass[l] / total, 1e-12);
}

TEST(BinomialSampler, ExactCountAndSupport) {
  const auto one = CityLayout::with_selection(0.1, 0.2, {{2, 1}});
  const auto batch = sample_binomial_cities(5, one, DensitySpec::uniform(), 4);
  ASSERT_EQ(batch.points.size(), 5u);
  for (const auto& p : batch.points) EXPECT_TRUE(one.square(0).contains(p));
  EXPECT_EQ(batch.process, PointProcess::kBinomial);
  EXPECT_EQ(batch.n_target, 5);
}

TEST(BinomialSampler, PerCityMeanCount) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  constexpr int kReps = 200;
  std::vector<double> sums(16, 0.0);
  for (int rep = 0; rep < kReps; ++rep) {
    const auto batch = sample_binomial_cities(1000, layout, DensitySpec::uniform(), derive_seed(1, {static_cast<std::uint64_t>(rep)}));
    const auto counts = city_counts(batch.points, layout);
    for (std::size_t l = 0; l < 16; ++l) sums[l] += static_cast<double>(counts[l]);
  }
  const double tol = 3.0 * std::sqrt(1000.0 * (1.0 / 16) * (15.0 / 16) / kReps);
  for (const double s : sums) EXPECT_NEAR(s / kReps, 62.5, tol);
}

TEST(BinomialSampler, Reproducible) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  const auto f = DensitySpec::cosine(0.4);
  const auto a = sample_binomial_cities(500, layout, f, 77);
  const auto b = sample_binomial_cities(500, layout, f, 77);
  const auto c = sample_binomial_cities(500, layout, f, 78);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
}

TEST(BinomialSampler, CoordinatesDistinct) {
  const auto batch = sample_unit_square(20000, DensitySpec::uniform(), 5);
  std::vector<double> xs, ys;
  for (const auto& p : batch.points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  EXPECT_EQ(std::adjacent_find(xs.begin(), xs.end()), xs.end());
  EXPECT_EQ(std::adjacent_find(ys.begin(), ys.end()), ys.end());
}

TEST(BinomialSampler, CosineChiSquareOnSingleCity) {
  const double delta = 0.5;
  const auto f = DensitySpec::cosine(delta);
  const auto batch = sample_binomial_cities(100000, CityLayout::unit_square(), f, 2024);
  std::vector<double> counts(100, 0.0);
  for (const auto& p : batch.points) {
    const int i = std::min(9, static_cast<int>(p.x * 10));
    const int j = std::min(9, static_cast<int>(p.y * 10));
    counts[static_cast<std::size_t>(i * 10 + j)] += 1.0;
  }
  double chi2 = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double expected = 100000.0 * oracle::cosine_mass(delta, i / 10.0, (i + 1) / 10.0, j / 10.0, (j + 1) / 10.0);
      const double d = counts[static_cast<std::size_t>(i * 10 + j)] - expected;
      chi2 += d * d / expected;
    }
  }
  // 99 degrees of freedom, upper 1e-3 point (z = 3.0902).
  EXPECT_LT(chi2, oracle::chi_square_quantile(99.0, 3.0902));
}

TEST(PoissonSampler, TotalCountMean) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  constexpr int kReps = 2000;
  std::vector<double> totals;
  for (int rep = 0; rep < kReps; ++rep) {
    const auto batch = sample_poisson_cities(200, layout, DensitySpec::uniform(), derive_seed(3, {static_cast<std::uint64_t>(rep)}));
    EXPECT_EQ(batch.process, PointProcess::kPoisson);
    for (const auto& p : batch.points) ASSERT_TRUE(layout.city_of(p));
    totals.push_back(static_cast<double>(batch.points.size()));
  }
  const auto m = moments(totals);
  EXPECT_NEAR(m.mean, 200.0, 3.0 * std::sqrt(200.0 / kReps));
}

TEST(PoissonSampler, DisjointCityCountsUncorrelated) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  constexpr int kReps = 2000;
  std::vector<double> a, b;
  for (int rep = 0; rep < kReps; ++rep) {
    const auto batch = sample_poisson_cities(100, layout, DensitySpec::cosine(0.3), derive_seed(4, {static_cast<std::uint64_t>(rep)}));
    const auto counts = city_counts(batch.points, layout);
    a.push_back(static_cast<double>(counts[0]));
    b.push_back(static_cast<double>(counts[5]));
  }
  EXPECT_LT(std::abs(correlation(a, b)), 3.0 / std::sqrt(kReps - 1.0));
}

TEST(PoissonSampler, EmptyProbabilityAtMeanOne) {
  const auto layout = CityLayout::unit_square();
  constexpr int kReps = 4000;
  int empty = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    empty += sample_poisson_cities(1, layout, DensitySpec::uniform(), derive_seed(5, {static_cast<std::uint64_t>(rep)}))
                     .points.empty()
                 ? 1
                 : 0;
  }
  const double p = std::exp(-1.0);
  EXPECT_NEAR(static_cast<double>(empty) / kReps, p, 3.0 * std::sqrt(p * (1 - p) / kReps));
}

// Conditioned on the total, Poisson city counts are multinomial.
TEST(PoissonSampler, ConditionedOnTotalIsBinomial) {
  const auto layout = CityLayout::with_selection(0.1, 0.2, {{0, 0}, {1, 0}});
  const auto f = DensitySpec::cosine(0.5);
  const auto probs = city_probabilities(layout, f);
  constexpr int kN = 8;
  std::vector<double> hist(kN + 1, 0.0);
  int hits = 0;
  for (std::uint64_t rep = 0; hits < 6000; ++rep) {
    const auto batch = sample_poisson_cities(kN, layout, f, derive_seed(6, {rep}));
    if (batch.points.size() != kN) continue;
    ++hits;
    hist[static_cast<std::size_t>(city_counts(batch.points, layout)[0])] += 1.0;
  }
  double chi2 = 0.0;
  int cells = 0;
  for (int k = 0; k <= kN; ++k) {
    const double expected = hits * oracle::binomial_pmf(kN, k, probs[0]);
    if (expected < 5.0) continue;
    chi2 += (hist[k] - expected) * (hist[k] - expected) / expected;
    ++cells;
  }
  EXPECT_LT(chi2, oracle::chi_square_quantile(cells - 1.0, 3.0902));
}

TEST(CityCounts, Examples) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  EXPECT_EQ(city_counts({}, layout), std::vector<std::int64_t>(16, 0));
  const std::vector<Point2> three{{0.01, 0.01}, {0.05, 0.02}, {0.09, 0.09}};
  const auto counts = city_counts(three, layout);
  EXPECT_EQ(counts[0], 3);
  for (std::size_t l = 1; l < 16; ++l) EXPECT_EQ(counts[l], 0);
  const auto batch = sample_binomial_cities(777, layout, DensitySpec::uniform(), 1);
  const auto c = city_counts(batch.points, layout);
  EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::int64_t{0}), 777);
}

TEST(CityCounts, StrayPointThrows) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  try {
    city_counts(std::vector<Point2>{{0.15, 0.15}}, layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStrayPoint);
  }
}

TEST(Occupancy, Examples) {
  const auto f = DensitySpec::uniform();
  const std::vector<std::int64_t> even{25, 25, 25, 25};
  const auto a = occupancy_event_U(even, 100, 4, f);
  EXPECT_TRUE(a.all);
  EXPECT_DOUBLE_EQ(a.lower, 12.5);
  EXPECT_DOUBLE_EQ(a.upper, 50.0);
  const std::vector<std::int64_t> lumped{100, 0, 0, 0};
  const auto b = occupancy_event_U(lumped, 100, 4, f);
  EXPECT_FALSE(b.all);
  EXPECT_EQ(b.in_band, (std::vector<bool>{false, false, false, false}));
}

TEST(Occupancy, HighProbabilityAtModerateN) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  int hits = 0;
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    const auto batch = sample_binomial_cities(2000, layout, DensitySpec::uniform(), derive_seed(8, {rep}));
    hits += occupancy_event_U(city_counts(batch.points, layout), 2000, 16, DensitySpec::uniform()).all ? 1 : 0;
  }
  EXPECT_GE(hits, 495);
}
