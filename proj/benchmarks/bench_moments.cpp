#include "freespec/moments.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace freespec;

namespace {

std::vector<double> draw(std::size_t len) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(len);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

static void BM_FreeCumulants(benchmark::State& state) {
  const MomentSequence m(draw(static_cast<std::size_t>(state.range(0))));
  const auto path = state.range(1) ? FreeCumulantPath::Mobius : FreeCumulantPath::Inductive;
  for (auto _ : state) benchmark::DoNotOptimize(free_cumulants_from_moments(m, path));
}
BENCHMARK(BM_FreeCumulants)->ArgsProduct({{6, 8, 10}, {0, 1}});

static void BM_FreeMoments(benchmark::State& state) {
  const CumulantSequence k(CumulantKind::Free, draw(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(free_moments_from_cumulants(k));
}
BENCHMARK(BM_FreeMoments)->Arg(10)->Arg(14);

static void BM_ClassicalCumulants(benchmark::State& state) {
  const MomentSequence m(draw(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(classical_cumulants_from_moments(m));
}
BENCHMARK(BM_ClassicalCumulants)->Arg(10)->Arg(12);

static void BM_FreenessTest(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const auto cov = CovarianceSpec::identity(2);
  const auto F = MomentFunctional::from_function(
      2, order, [&](std::span<const int> w) { return semicircular_family_moment(w, cov); });
  for (auto _ : state) benchmark::DoNotOptimize(freeness_test(F, order));
}
BENCHMARK(BM_FreenessTest)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);
