#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "citymst/bounds.hpp"
#include "citymst/error.hpp"
#include "citymst/rng.hpp"
#include "citymst/sampling.hpp"
#include "oracles.hpp"

using namespace citymst;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kAssertionFailure;
}

bool is_permutation_of_indices(const std::vector<std::uint32_t>& order, std::size_t n) {
  std::vector<bool> seen(n, false);
  if (order.size() != n) return false;
  for (const auto k : order) {
    if (k >= n || seen[k]) return false;
    seen[k] = true;
  }
  return true;
}

}  // namespace

TEST(Strips, SinglePoint) {
  const std::vector<Point2> one{{0.4, 0.6}};
  const auto plan = strips_path(one, AxisSquare::unit());
  EXPECT_EQ(plan.path_len, 0.0);
  EXPECT_EQ(plan.visit_order.size(), 1u);
}

TEST(Strips, SerpentineOrder) {
  // Two strips of width 0.5: left strip top-down, right strip bottom-up.
  const std::vector<Point2> pts{{0.1, 0.2}, {0.2, 0.9}, {0.7, 0.8}, {0.6, 0.1}};
  const auto plan = strips_path(pts, AxisSquare::unit(), 0.5);
  EXPECT_EQ(plan.strip_count, 2u);
  EXPECT_EQ(plan.visit_order, (std::vector<std::uint32_t>{1, 0, 3, 2}));
}

TEST(Strips, StripCountSnapsExactQuotients) {
  const auto pts = oracle::uniform_points(10, 1);
  EXPECT_EQ(strips_path(pts, AxisSquare::unit(), 0.1).strip_count, 10u);
  EXPECT_EQ(strips_path(pts, AxisSquare::unit(), 0.3).strip_count, 4u);
  EXPECT_EQ(strips_path(pts, AxisSquare::unit(), 1.0 / 3.0).strip_count, 3u);
}

TEST(Strips, BoundsHoldOnUniformInstances) {
  for (const std::size_t n : {10u, 100u, 1000u}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto pts = oracle::uniform_points(n, seed * 13 + n);
      const auto plan = strips_path(pts, AxisSquare::unit());
      ASSERT_TRUE(is_permutation_of_indices(plan.visit_order, n));
      ASSERT_LE(plan.path_len, plan.guarantee() + 1e-12);
      ASSERT_LT(plan.path_len, 3.0 * std::sqrt(static_cast<double>(n)));
      ASSERT_LE(exact_mst(pts).total_len(), plan.path_len + 1e-12);
    }
  }
}

TEST(Strips, GuaranteeHoldsForAnyWidthAndScaledSquare) {
  const AxisSquare rect{{0.2, 0.3}, 0.5};
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t a = 1 + gen() % 400;
    std::vector<Point2> pts(a);
    for (auto& p : pts) p = {rect.origin.x + rect.side * u(gen), rect.origin.y + rect.side * u(gen)};
    const double c = 0.01 + 0.5 * u(gen);
    const auto plan = strips_path(pts, rect, c);
    ASSERT_LE(plan.path_len, plan.guarantee() + 1e-12);
    const auto dflt = strips_path(pts, rect);
    ASSERT_LE(dflt.path_len, 3.0 * rect.side * std::sqrt(static_cast<double>(a)) + 1e-12);
    const auto tree = dflt.to_tree(pts);
    ASSERT_TRUE(tree.is_spanning_tree());
    ASSERT_NEAR(tree.total_len(), dflt.path_len, 1e-9);
  }
}

TEST(Strips, Errors) {
  EXPECT_EQ(code_of([] { strips_path(std::vector<Point2>{{1.2, 0.5}}, AxisSquare::unit()); }),
            ErrorCode::kOutsideRect);
  EXPECT_EQ(code_of([] { strips_path(std::vector<Point2>{}, AxisSquare::unit()); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { strips_path(std::vector<Point2>{{0.5, 0.5}}, AxisSquare::unit(), 0.0); }),
            ErrorCode::kInvalidArgument);
}

TEST(CombineTrees, SinglePointB) {
  const auto a = oracle::uniform_points(30, 1);
  const auto ta = exact_mst(a);
  const std::vector<Point2> b{{0.99, 0.99}};
  const auto t = combine_trees(ta, a, b);
  ASSERT_TRUE(t.is_spanning_tree());
  EXPECT_EQ(t.node_count(), 31u);
  EXPECT_LE(t.total_len() - ta.total_len(), std::sqrt(2.0));
}

TEST(CombineTrees, RandomSplitWithinBound) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto all = oracle::uniform_points(200, seed + 100);
    const std::vector<Point2> a(all.begin(), all.begin() + 150);
    const std::vector<Point2> b(all.begin() + 150, all.end());
    const auto ta = exact_mst(a);
    const auto t = combine_trees(ta, a, b);
    ASSERT_TRUE(t.is_spanning_tree());
    EXPECT_LE(t.total_len(), ta.total_len() + 3.0 * std::sqrt(50.0) + std::sqrt(2.0));
    EXPECT_GE(t.total_len(), exact_mst(all).total_len() - 1e-9);
  }
}

TEST(CombineTrees, FarCornerClusterJoinsWithinDiameter) {
  const auto a = std::vector<Point2>{{0.01, 0.01}, {0.02, 0.03}};
  std::vector<Point2> b;
  for (const auto& p : oracle::uniform_points(20, 3)) b.push_back({0.95 + 0.05 * p.x, 0.95 + 0.05 * p.y});
  const auto ta = exact_mst(a);
  const auto t = combine_trees(ta, a, b);
  const auto plan = strips_path(b, AxisSquare::unit());
  EXPECT_LE(t.total_len() - ta.total_len() - plan.path_len, std::sqrt(2.0));
}

TEST(CombineTrees, EmptyBThrows) {
  const auto a = oracle::uniform_points(5, 1);
  EXPECT_EQ(code_of([&] { combine_trees(exact_mst(a), a, std::vector<Point2>{}); }), ErrorCode::kEmptyB);
}

TEST(GridJoin, SingleCellIsExactMst) {
  const auto pts = oracle::uniform_points(300, 8);
  const auto g = grid_join(pts, 1);
  EXPECT_EQ(g.join_edges, 0u);
  EXPECT_NEAR(g.tree.total_len(), exact_mst(pts).total_len(), 1e-12);
}

TEST(GridJoin, TotalWithinCellSumPlusJoins) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = oracle::uniform_points(1000, seed);
    const auto g = grid_join(pts, 4);
    ASSERT_TRUE(g.tree.is_spanning_tree());
    EXPECT_GE(g.tree.total_len(), exact_mst(pts).total_len() - 1e-9);
    EXPECT_LE(g.tree.total_len(), g.cell_mst_sum + 4.0 * 4.0 * std::sqrt(2.0));
  }
}

TEST(GridJoin, OneOccupiedCell) {
  std::vector<Point2> pts;
  for (const auto& p : oracle::uniform_points(40, 6)) pts.push_back({0.4 + 0.2 * p.x, 0.4 + 0.2 * p.y});
  const auto g = grid_join(pts, 3);
  EXPECT_EQ(g.join_edges, 0u);
  EXPECT_NEAR(g.tree.total_len(), exact_mst(pts).total_len(), 1e-12);
}

TEST(CityUpper, SingleCityIsExactMst) {
  const auto layout = CityLayout::with_selection(0.1, 0.2, {{1, 1}});
  const auto batch = sample_binomial_cities(200, layout, DensitySpec::uniform(), 3);
  const auto up = city_upper_tree(batch.points, layout);
  EXPECT_NEAR(up.tree.total_len(), exact_mst(batch.points).total_len(), 1e-12);
  EXPECT_NEAR(up.bound, up.city_mst_sum, 1e-12);
}

TEST(CityUpper, BoundAndDominanceOnSixteenCities) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    const auto batch = sample_binomial_cities(2000, layout, DensitySpec::uniform(), derive_seed(12, {rep}));
    const auto up = city_upper_tree(batch.points, layout);
    ASSERT_TRUE(up.all_occupied);
    ASSERT_TRUE(up.tree.is_spanning_tree());
    EXPECT_LE(up.tree.total_len(), up.city_mst_sum + 15.0 + 1e-9);
    EXPECT_NEAR(up.bound, up.city_mst_sum + 15.0, 1e-9);
    EXPECT_LE(exact_mst(batch.points).total_len(), up.tree.total_len() + 1e-9);
  }
}

TEST(CityUpper, EmptyCityFallsBackToStrips) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  const std::vector<Point2> pts{{0.05, 0.05}, {0.35, 0.05}, {0.02, 0.06}};
  const auto up = city_upper_tree(pts, layout);
  EXPECT_FALSE(up.all_occupied);
  EXPECT_TRUE(up.tree.is_spanning_tree());
  EXPECT_DOUBLE_EQ(up.bound, 3.0 * std::sqrt(3.0));
  EXPECT_EQ(code_of([&] { city_upper_tree(std::vector<Point2>{}, layout); }), ErrorCode::kEmptyBatch);
}

TEST(CityUpper, JoinOrderIsBfsTreeOfSelection) {
  const auto layout = CityLayout::with_selection(0.1, 0.2, {{1, 1}, {0, 1}, {1, 0}, {1, 2}, {2, 2}});
  const auto joins = city_join_order(layout);
  ASSERT_EQ(joins.size(), layout.size() - 1);
  oracle::UnionFind uf(layout.size());
  for (const auto& [a, b] : joins) {
    EXPECT_TRUE(lattice_adjacent(layout.selected()[a], layout.selected()[b]));
    EXPECT_TRUE(uf.unite(a, b));
  }
  EXPECT_EQ(layout.selected()[joins.front().first], (LatticeCoord{0, 1}));
}

TEST(CityLower, SmallCitiesContributeNothing) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  const std::vector<Point2> pts{{0.05, 0.05}, {0.06, 0.02}, {0.35, 0.05}};
  EXPECT_EQ(city_lower_bound(pts, layout), 0.0);
}

TEST(CityLower, BelowExactMst) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const auto batch = sample_binomial_cities(300, layout, DensitySpec::cosine(0.5), derive_seed(13, {rep}));
    EXPECT_LE(city_lower_bound(batch.points, layout), exact_mst(batch.points).total_len() + 1e-9);
  }
}

TEST(CityLower, RefusesWithoutSeparation) {
  const auto layout = CityLayout::all_cities(0.1, 0.05);
  const std::vector<Point2> pts{{0.05, 0.05}};
  EXPECT_EQ(code_of([&] { city_lower_bound(pts, layout); }), ErrorCode::kHypothesisViolated);
}

TEST(PathLocality, SameCityPathsStayInCity) {
  const auto layout = CityLayout::all_cities(0.1, 0.2);
  std::mt19937_64 gen(17);
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto batch = sample_binomial_cities(2000, layout, DensitySpec::uniform(), derive_seed(14, {rep}));
    const auto& pts = batch.points;
    const auto t = exact_mst(pts);
    const auto members = city_members(pts, layout);
    for (int pair = 0; pair < 100; ++pair) {
      const auto& m = members[gen() % members.size()];
      if (m.size() < 2) continue;
      const auto a = m[gen() % m.size()];
      const auto b = m[gen() % m.size()];
      if (a == b) continue;
      const auto city = layout.city_of(pts[a]);
      for (const auto node : tree_path(t, a, b)) ASSERT_EQ(layout.city_of(pts[node]), city);
    }
  }
}
