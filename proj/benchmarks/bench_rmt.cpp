#include "freespec/rmt.hpp"

#include <benchmark/benchmark.h>

using namespace freespec;

static void BM_SampleGUE(benchmark::State& state) {
  EnsembleSpec e;
  e.n = static_cast<int>(state.range(0));
  e.seed = 3;
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample(e, t++));
}
BENCHMARK(BM_SampleGUE)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

static void BM_HaarUnitary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(haar_unitary(n, t++));
}
BENCHMARK(BM_HaarUnitary)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

static void BM_GUESpectrum(benchmark::State& state) {
  EnsembleSpec e;
  e.n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_spectrum(e, 1, false, 1));
}
BENCHMARK(BM_GUESpectrum)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
