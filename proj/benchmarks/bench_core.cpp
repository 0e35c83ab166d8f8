#include <benchmark/benchmark.h>

#include "citymst/bounds.hpp"
#include "citymst/experiments.hpp"
#include "citymst/mst.hpp"
#include "citymst/sampling.hpp"

using namespace citymst;

namespace {

std::vector<Point2> uniform(std::int64_t n) {
  return sample_unit_square(n, DensitySpec::uniform(), 7).points;
}

void BM_ExactMst(benchmark::State& state) {
  const auto pts = uniform(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_mst(pts).total_len());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactMst)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

void BM_DensePrim(benchmark::State& state) {
  const auto pts = uniform(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dense_prim_mst(pts).total_len());
}
BENCHMARK(BM_DensePrim)->RangeMultiplier(4)->Range(64, 4096);

void BM_StripsPath(benchmark::State& state) {
  const auto pts = uniform(state.range(0));
  const AxisSquare unit{{0.0, 0.0}, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(strips_path(pts, unit).path_len);
}
BENCHMARK(BM_StripsPath)->RangeMultiplier(8)->Range(64, 32768);

void BM_CityUpperTree(benchmark::State& state) {
  const auto layout = CityLayout::all_cities(0.01, 0.056);
  const auto pts = sample_binomial_cities(state.range(0), layout, DensitySpec::uniform(), 3).points;
  for (auto _ : state) benchmark::DoNotOptimize(city_upper_tree(pts, layout).bound);
}
BENCHMARK(BM_CityUpperTree)->Arg(5000)->Arg(20000);

void BM_SampleCosine(benchmark::State& state) {
  const auto f = DensitySpec::cosine(0.5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_unit_square(state.range(0), f, ++seed).points.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleCosine)->Arg(10000);

void BM_DetectZtot(benchmark::State& state) {
  const auto pts = uniform(state.range(0) + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect_Ztot(pts, state.range(0), 2.0, DensitySpec::uniform()).holds_leave_one_out);
  }
}
BENCHMARK(BM_DetectZtot)->Arg(4000)->Arg(16000);

}  // namespace

BENCHMARK_MAIN();
