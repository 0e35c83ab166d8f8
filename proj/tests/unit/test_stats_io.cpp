#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "citymst/error.hpp"
#include "citymst/io.hpp"
#include "citymst/parallel.hpp"
#include "citymst/stats.hpp"
#include "oracles.hpp"

using namespace citymst;

TEST(Moments, OnePassMatchesTwoPass) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> d(1e3, 2.5);
  std::vector<double> v(10000);
  for (auto& x : v) x = d(gen);
  const auto m = moments(v);
  const auto ref = oracle::two_pass(v);
  EXPECT_NEAR(m.mean, ref.mean, 1e-9 * std::abs(ref.mean));
  EXPECT_NEAR(m.variance, ref.variance, 1e-9 * ref.variance);
  EXPECT_DOUBLE_EQ(m.stderr_mean, std::sqrt(m.variance / 10000.0));
  EXPECT_EQ(m.count, 10000);
  EXPECT_EQ(m.min, *std::min_element(v.begin(), v.end()));
  EXPECT_EQ(m.max, *std::max_element(v.begin(), v.end()));
}

TEST(Moments, MergeMatchesSinglePass) {
  const auto v = oracle::uniform_points(5000, 2);
  MomentAccumulator whole, left, right;
  for (std::size_t k = 0; k < v.size(); ++k) {
    whole.add(v[k].x);
    (k < 1234 ? left : right).add(v[k].x);
  }
  left.merge(right);
  const auto a = whole.estimate();
  const auto b = left.estimate();
  EXPECT_NEAR(a.mean, b.mean, 1e-12);
  EXPECT_NEAR(a.variance, b.variance, 1e-12);
  EXPECT_EQ(a.count, b.count);
}

TEST(Moments, DegenerateCounts) {
  const auto none = MomentAccumulator{}.estimate();
  EXPECT_EQ(none.count, 0);
  EXPECT_EQ(none.variance, 0.0);
  const std::vector<double> one{3.0};
  const auto m = moments(one);
  EXPECT_EQ(m.mean, 3.0);
  EXPECT_EQ(m.variance, 0.0);
}

TEST(Stats, CorrelationQuantileSlope) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const std::vector<double> z{5, 4, 3, 2, 1};
  EXPECT_NEAR(correlation(x, y), 1.0, 1e-12);
  EXPECT_NEAR(correlation(x, z), -1.0, 1e-12);
  EXPECT_EQ(correlation(x, std::vector<double>{1, 1, 1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.25), 1.25);
  EXPECT_NEAR(ols_slope(x, y), 2.0, 1e-12);
}

TEST(EventStats, Frequency) {
  EventStats e{"U"};
  EXPECT_EQ(e.frequency(), 0.0);
  e.record(true);
  e.record(false);
  e.record(true);
  e.record(true);
  EXPECT_DOUBLE_EQ(e.frequency(), 0.75);
}

TEST(Csv, ShortestRoundTripDoubles) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 10000; ++k) {
    const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    const auto text = format_double(v);
    ASSERT_EQ(std::stod(text), v) << text;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, WriteReadRoundTrip) {
  Table t{{"n", "name", "value"}, {}};
  t.rows.push_back({std::int64_t{5}, std::string("alpha"), 0.125});
  t.rows.push_back({std::int64_t{7}, std::string("beta"), -3.5e-12});
  const auto back = parse_csv(to_csv(t));
  EXPECT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(std::get<std::int64_t>(back.rows[1][0]), 7);
  EXPECT_EQ(std::get<std::string>(back.rows[0][1]), "alpha");
  EXPECT_EQ(back.number(1, "value"), -3.5e-12);
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), Error);
}

TEST(Csv, PointAndTreeTables) {
  const auto pts = oracle::uniform_points(50, 7);
  const auto dir = std::filesystem::temp_directory_path() / "citymst_io_test";
  write_csv(points_table(pts), dir / "pts.csv");
  const auto back = points_from_table(read_csv(dir / "pts.csv"));
  EXPECT_EQ(back, pts);
  EXPECT_EQ(read_csv(dir / "pts.csv").columns, (std::vector<std::string>{"idx", "x", "y"}));
  const auto tree = exact_mst(pts);
  const auto tt = tree_table(tree);
  EXPECT_EQ(tt.columns, (std::vector<std::string>{"i", "j", "len"}));
  EXPECT_EQ(tt.rows.size(), 49u);
  std::filesystem::remove_all(dir);
}

TEST(Csv, AggregateGroupsByN) {
  Table raw{{"n", "rep", "value", "label"}, {}};
  for (std::int64_t n : {10, 20}) {
    for (std::int64_t rep = 0; rep < 4; ++rep) {
      raw.rows.push_back({n, rep, static_cast<double>(n + rep), std::string("x")});
    }
  }
  const std::vector<Table> raws{raw};
  const auto agg = aggregate_raw(raws);
  EXPECT_EQ(agg.columns, (std::vector<std::string>{"n", "rows", "value_mean", "value_var", "value_stderr",
                                                   "value_min", "value_max"}));
  ASSERT_EQ(agg.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(agg.number(0, "value_mean"), 11.5);
  EXPECT_DOUBLE_EQ(agg.number(1, "value_min"), 20.0);
  EXPECT_DOUBLE_EQ(agg.number(1, "rows"), 4.0);
}

TEST(ParallelMap, IndexOrderAndExceptions) {
  const auto out = parallel_map(1000, 8, [](std::size_t k) { return k * k; });
  for (std::size_t k = 0; k < out.size(); ++k) ASSERT_EQ(out[k], k * k);
  try {
    parallel_map(100, 4, [](std::size_t k) -> int {
      if (k == 17 || k == 60) throw std::runtime_error(std::to_string(k));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
