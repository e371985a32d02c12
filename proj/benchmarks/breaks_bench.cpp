#include <benchmark/benchmark.h>

#include <random>

#include "regimeshift/breaks.hpp"

namespace br = regimeshift::breaks;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

void BM_SsrTable(benchmark::State& state) {
  const auto y = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(br::segment_ssr_table(y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SsrTable)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_EstimateBreaks(benchmark::State& state) {
  const auto y = noise(static_cast<std::size_t>(state.range(0)));
  const auto table = br::segment_ssr_table(y);
  const std::size_t h = br::min_segment_length(0.15, y.size());
  for (auto _ : state) benchmark::DoNotOptimize(br::estimate_breaks(y, table, h, static_cast<std::size_t>(state.range(1))));
}
BENCHMARK(BM_EstimateBreaks)->Args({365, 1})->Args({365, 3})->Args({365, 5})->Args({1000, 5});

void BM_SelectNumBreaks(benchmark::State& state) {
  const auto y = noise(365);
  br::BreakConfig cfg;
  cfg.max_breaks = 5;
  for (auto _ : state) benchmark::DoNotOptimize(br::select_num_breaks(y, cfg));
}
BENCHMARK(BM_SelectNumBreaks);

void BM_SupFTest(benchmark::State& state) {
  const auto y = noise(365);
  const br::BreakConfig cfg;
  (void)br::supf_test(y, cfg);  // warm the memoized null
  for (auto _ : state) benchmark::DoNotOptimize(br::supf_test(y, cfg));
}
BENCHMARK(BM_SupFTest);

}  // namespace
