#include <benchmark/benchmark.h>

#include "retro/metrics.hpp"
#include "retro/rng.hpp"
#include "retro/votegen.hpp"

namespace {

// Sorted-prefix form against the quadratic pairwise form.
void BM_gini_sorted(benchmark::State& state) {
  auto rng = retro::CounterRng::derive(29, {});
  const auto a = retro::dirichlet_sample(static_cast<std::size_t>(state.range(0)), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(retro::gini_index(a.weights()));
}

void BM_gini_pairwise(benchmark::State& state) {
  auto rng = retro::CounterRng::derive(29, {});
  const auto a = retro::dirichlet_sample(static_cast<std::size_t>(state.range(0)), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(retro::gini_index_direct(a.weights()));
}

BENCHMARK(BM_gini_sorted)->RangeMultiplier(4)->Range(16, 4096);
BENCHMARK(BM_gini_pairwise)->RangeMultiplier(4)->Range(16, 4096);

}  // namespace
