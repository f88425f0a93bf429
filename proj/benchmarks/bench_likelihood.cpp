#include <benchmark/benchmark.h>

#include <map>

#include "patent_rent/data_io.hpp"
#include "patent_rent/likelihood.hpp"

using namespace patent_rent;

namespace {

ModelParams truth() {
  ModelParams p;
  p.sigma = 1.5;
  p.d = 0.3;
  p[Coef::intercept] = 6.0;
  p[Coef::family_size] = 0.1;
  p[Coef::grant_lag] = -0.2;
  p[Coef::tech_scope] = 0.3;
  return p;
}

const std::vector<PatentRecord>& cohort(std::size_t n) {
  static std::map<std::size_t, std::vector<PatentRecord>> cache;
  auto& v = cache[n];
  if (v.empty())
    v = generate_synthetic(truth(), n, builtin_schedule("india"), ModelConfig{},
                           CovariateSpec::indian_cohort_defaults(), 1);
  return v;
}

void BM_ExpiryPmf(benchmark::State& state) {
  const FeeSchedule india = builtin_schedule("india");
  const ModelParams p = truth();
  CovariateVector x;
  x.family_size = 3;
  x.grant_lag = 7;
  for (auto _ : state) benchmark::DoNotOptimize(expiry_pmf(p, x, india, ModelConfig{}));
}
BENCHMARK(BM_ExpiryPmf);

// Cached thresholds: the cost the GA pays per individual.
void BM_EvaluatorCachedD(benchmark::State& state) {
  const auto& records = cohort(static_cast<std::size_t>(state.range(0)));
  const LikelihoodEvaluator eval(records, builtin_schedule("india"), ModelConfig{});
  const ModelParams p = truth();
  for (auto _ : state) benchmark::DoNotOptimize(eval(p).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluatorCachedD)->Arg(555)->Arg(5000);

void BM_LogLikelihoodUncached(benchmark::State& state) {
  const auto& records = cohort(static_cast<std::size_t>(state.range(0)));
  const FeeSchedule india = builtin_schedule("india");
  const ModelParams p = truth();
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(p, records, india, ModelConfig{}).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihoodUncached)->Arg(555)->Arg(5000);

}  // namespace
