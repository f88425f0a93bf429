#include <benchmark/benchmark.h>

#include "patent_rent/data_io.hpp"
#include "patent_rent/ga_estimator.hpp"

using namespace patent_rent;

namespace {

// One start of one generation at full population on the observed sample size.
void BM_GaGeneration(benchmark::State& state) {
  ModelParams truth;
  truth.sigma = 1.5;
  truth.d = 0.3;
  truth[Coef::intercept] = 6.0;
  truth[Coef::grant_lag] = -0.2;
  const FeeSchedule india = builtin_schedule("india");
  const auto records =
      generate_synthetic(truth, 555, india, ModelConfig{}, CovariateSpec::indian_cohort_defaults(), 3);
  GaConfig ga;
  ga.population_size = static_cast<std::size_t>(state.range(0));
  ga.generations = 1;
  ga.starts = 1;
  ga.elite_size = 10;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate(records, india, ModelConfig{}, ga, ParamBounds::defaults()));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_GaGeneration)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
