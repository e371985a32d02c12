#include <benchmark/benchmark.h>

#include <random>

#include "regimeshift/svar.hpp"

namespace sv = regimeshift::svar;

namespace {

sv::Panel panel(std::size_t n) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d;
  Eigen::MatrixXd y(static_cast<Eigen::Index>(n), 2);
  y.row(0) << d(rng), d(rng);
  for (Eigen::Index t = 1; t < y.rows(); ++t) {
    y(t, 0) = 0.4 * y(t - 1, 0) + 0.1 * y(t - 1, 1) + d(rng);
    y(t, 1) = 0.2 * y(t - 1, 1) + d(rng);
  }
  return sv::make_panel(y);
}

void BM_FitVar(benchmark::State& state) {
  const auto p = panel(365);
  for (auto _ : state) benchmark::DoNotOptimize(sv::fit_var(p, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_FitVar)->Arg(1)->Arg(7)->Arg(14);

void BM_SelectLag(benchmark::State& state) {
  const auto p = panel(365);
  for (auto _ : state) benchmark::DoNotOptimize(sv::select_lag(p, 14));
}
BENCHMARK(BM_SelectLag);

void BM_WaldTest(benchmark::State& state) {
  const auto a = sv::fit_var(panel(200), 4);
  const auto b = sv::fit_var(panel(165), 4);
  for (auto _ : state) benchmark::DoNotOptimize(sv::wald_test(a, b));
}
BENCHMARK(BM_WaldTest);

}  // namespace
