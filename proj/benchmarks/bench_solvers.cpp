#include "freespec/convolution.hpp"
#include "freespec/deteq.hpp"

#include <benchmark/benchmark.h>

using namespace freespec;

static void BM_SubordinationPoint(benchmark::State& state) {
  const auto b = cauchy_transform(SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5}));
  const Complex z(0.5, state.range(0) ? 1e-3 : 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(subordination_solve(b, b, z));
}
BENCHMARK(BM_SubordinationPoint)->Arg(0)->Arg(1);

static void BM_FreeConvolveGrid(benchmark::State& state) {
  const auto sc = semicircle_transform(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(free_convolve(sc, sc, GridSpec{-5.0, 5.0, 0.01}, 1e-3, {}, 1));
}
BENCHMARK(BM_FreeConvolveGrid)->Unit(benchmark::kMillisecond);

static void BM_HermitianBanded(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vp = VarianceProfile::banded(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_hermitian(vp, {}, Complex(0.5, 0.1)));
}
BENCHMARK(BM_HermitianBanded)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

static void BM_HermitianDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vp = VarianceProfile::banded(n, 5);
  DeteqOptions o;
  o.force_dense = true;
  for (auto _ : state) benchmark::DoNotOptimize(solve_hermitian(vp, {}, Complex(0.5, 0.1), o));
}
BENCHMARK(BM_HermitianDense)->RangeMultiplier(2)->Range(32, 128)->Unit(benchmark::kMillisecond);

static void BM_Capacity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto vp = VarianceProfile::constant(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(capacity(vp, {}, 1.0));
}
BENCHMARK(BM_Capacity)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
