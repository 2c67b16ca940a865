#include <benchmark/benchmark.h>

#include "retro/rules.hpp"
#include "retro/votegen.hpp"

namespace {

retro::Profile make_profile(std::size_t n, std::size_t m) {
  retro::GenSpec spec;
  spec.voters = n;
  spec.projects = m;
  spec.seed = 17;
  return retro::generate_profile(spec).profile;
}

void run_rule(benchmark::State& state, retro::RuleKind kind) {
  const auto p = make_profile(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)));
  const auto rule = retro::RuleSpec::of(kind);
  for (auto _ : state) benchmark::DoNotOptimize(retro::allocate(p, rule));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

// Shapes of the two published rounds plus a small committee.
void shapes(benchmark::internal::Benchmark* b) {
  b->Args({20, 30})->Args({40, 145})->Args({108, 229})->Args({145, 600});
}

void BM_quadratic(benchmark::State& s) { run_rule(s, retro::RuleKind::quadratic); }
void BM_mean(benchmark::State& s) { run_rule(s, retro::RuleKind::mean); }
void BM_quorum_median(benchmark::State& s) { run_rule(s, retro::RuleKind::quorum_median); }
void BM_capped_median(benchmark::State& s) { run_rule(s, retro::RuleKind::capped_median); }
void BM_normalized_median(benchmark::State& s) { run_rule(s, retro::RuleKind::normalized_median); }
void BM_midpoint(benchmark::State& s) { run_rule(s, retro::RuleKind::midpoint); }

BENCHMARK(BM_quadratic)->Apply(shapes);
BENCHMARK(BM_mean)->Apply(shapes);
BENCHMARK(BM_quorum_median)->Apply(shapes);
BENCHMARK(BM_capped_median)->Apply(shapes);
BENCHMARK(BM_normalized_median)->Apply(shapes);
BENCHMARK(BM_midpoint)->Apply(shapes);

}  // namespace
