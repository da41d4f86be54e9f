#include "freespec/partitions.hpp"

#include <benchmark/benchmark.h>

using namespace freespec;

static void BM_StreamNonCrossing(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    std::uint64_t seen = 0;
    for_each_partition(n, PartitionClass::NonCrossing, [&](const Partition&) { ++seen; });
    benchmark::DoNotOptimize(seen);
  }
  state.counters["partitions"] = static_cast<double>(count_partitions(n, PartitionClass::NonCrossing));
}
BENCHMARK(BM_StreamNonCrossing)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

static void BM_EnumerateAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(n, PartitionClass::All));
}
BENCHMARK(BM_EnumerateAll)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_MobiusToTop(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto nc = enumerate(n, PartitionClass::NonCrossing);
  const auto top = Partition::coarsest(n);
  for (auto _ : state)
    for (const auto& p : nc) benchmark::DoNotOptimize(mobius_nc(p, top));
}
BENCHMARK(BM_MobiusToTop)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);
