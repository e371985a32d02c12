#include <benchmark/benchmark.h>

#include <random>

#include "regimeshift/hht.hpp"

namespace hht = regimeshift::hht;

namespace {

std::vector<double> walk(std::size_t n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  double level = 0.0;
  for (auto& v : x) v = level += d(rng);
  return x;
}

void BM_Emd(benchmark::State& state) {
  const auto x = walk(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hht::emd(x));
}
BENCHMARK(BM_Emd)->Arg(365)->Arg(1024)->Arg(4096);

void BM_AnalyticSignal(benchmark::State& state) {
  const auto x = walk(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hht::analytic_signal(x));
}
BENCHMARK(BM_AnalyticSignal)->Arg(365)->Arg(4096);

void BM_Analyze(benchmark::State& state) {
  const auto x = walk(365);
  for (auto _ : state) benchmark::DoNotOptimize(hht::analyze(x));
}
BENCHMARK(BM_Analyze);

}  // namespace
