#include <benchmark/benchmark.h>

#include "yaoyao/measures.hpp"
#include "yaoyao/solver.hpp"
#include "yaoyao/verify.hpp"

namespace {

yaoyao::MeasureSpec gaussian(std::size_t n) {
  yaoyao::GaussianComponent c;
  c.mean.assign(n, 0.0);
  c.cov_factor.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) c.cov_factor[i * n + i] = 1.0;
  yaoyao::MeasureSpec spec;
  spec.dimension = n;
  spec.kind = yaoyao::GaussianMixture{{c}};
  return spec;
}

void BM_WeightedMedian(benchmark::State& state) {
  const auto cloud = yaoyao::sample(gaussian(1), static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(yaoyao::weighted_quantile(cloud.column(0), cloud.weights(), 0.5));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WeightedMedian)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_Center(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cloud = yaoyao::sample(gaussian(n), static_cast<std::size_t>(state.range(1)), 2);
  const yaoyao::SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(yaoyao::center_prefix(cloud, n, cfg));
}
BENCHMARK(BM_Center)->Args({2, 1024})->Args({2, 4096})->Args({3, 1024})->Args({3, 4096})
    ->Unit(benchmark::kMillisecond);

void BM_Oracle2d(benchmark::State& state) {
  const auto cloud = yaoyao::sample(gaussian(2), 128, 3);
  for (auto _ : state) benchmark::DoNotOptimize(yaoyao::oracle_center_2d(cloud));
}
BENCHMARK(BM_Oracle2d)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
