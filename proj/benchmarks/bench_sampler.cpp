#include <benchmark/benchmark.h>

#include <cmath>

#include "patent_rent/value_simulator.hpp"

using namespace patent_rent;

namespace {

void BM_TruncatedNormal(benchmark::State& state, EpsilonInterval interval) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_truncated_normal(1.5, interval, n, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_TruncatedNormal, bounded, EpsilonInterval{-0.5, 0.7})->Arg(10000);
BENCHMARK_CAPTURE(BM_TruncatedNormal, upper_tail, EpsilonInterval{9.0, INFINITY})->Arg(10000);
BENCHMARK_CAPTURE(BM_TruncatedNormal, deep_left, EpsilonInterval{-40.0, -39.0})->Arg(10000);

void BM_SimulateInitialReturn(benchmark::State& state) {
  ModelParams p;
  p.sigma = 1.5;
  p.d = 0.3;
  p[Coef::intercept] = 6.0;
  PatentRecord r;
  r.patent_id = "bench";
  r.expiry_age = 9;
  const FeeSchedule india = builtin_schedule("india");
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_initial_return(p, r, india, ModelConfig{}, 10000, ++seed));
}
BENCHMARK(BM_SimulateInitialReturn);

}  // namespace
