#include <benchmark/benchmark.h>

#include "retro/phantoms.hpp"
#include "retro/votegen.hpp"

namespace {

void run_solver(benchmark::State& state, retro::PhantomFamily family) {
  retro::GenSpec spec;
  spec.voters = static_cast<std::size_t>(state.range(0));
  spec.projects = static_cast<std::size_t>(state.range(1));
  spec.seed = 23;
  const auto p = retro::generate_profile(spec).profile;
  for (auto _ : state) benchmark::DoNotOptimize(retro::solve_phantoms(p, family));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_independent_markets(benchmark::State& s) {
  run_solver(s, retro::PhantomFamily::independent_markets);
}
void BM_majoritarian_phantoms(benchmark::State& s) {
  run_solver(s, retro::PhantomFamily::majoritarian);
}

BENCHMARK(BM_independent_markets)->Args({5, 4})->Args({20, 30})->Args({40, 145})->Args({145, 600});
BENCHMARK(BM_majoritarian_phantoms)->Args({5, 4})->Args({20, 30})->Args({40, 145})->Args({145, 600});

}  // namespace
