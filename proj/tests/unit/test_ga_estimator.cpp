#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "patent_rent/data_io.hpp"
#include "patent_rent/errors.hpp"
#include "patent_rent/ga_estimator.hpp"
#include "patent_rent/likelihood.hpp"

using namespace patent_rent;

namespace {

const FeeSchedule kIndia = builtin_schedule("india");

GaConfig small_ga(std::uint64_t seed) {
  GaConfig ga;
  ga.population_size = 120;
  ga.generations = 6;
  ga.starts = 2;
  ga.elite_size = 20;
  ga.tournament_size = 4;
  ga.seed = seed;
  return ga;
}

std::vector<PatentRecord> cohort(std::size_t n, std::uint64_t seed) {
  return generate_synthetic(fixtures::recovery_params(), n, kIndia, ModelConfig{},
                            CovariateSpec::indian_cohort_defaults(), seed);
}

// Concave quadratic with its peak at `peak`.
Objective quadratic(ParamVector peak) {
  return [peak](const ParamVector& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < kParamCount; ++i) s -= (v[i] - peak[i]) * (v[i] - peak[i]) * (1.0 + i);
    return s;
  };
}

}  // namespace

TEST(ParamVector, RoundTripAndNames) {
  const ModelParams p = fixtures::recovery_params();
  EXPECT_EQ(from_vector(to_vector(p)), p);
  EXPECT_EQ(param_name(kSigmaIndex), "sigma");
  EXPECT_EQ(param_name(kDepreciationIndex), "d");
  EXPECT_EQ(param_name(param_index(Coef::grant_lag)), "grant_lag");
}

TEST(ParamBounds, DefaultsEncodeSignConstraints) {
  const ParamBounds b = ParamBounds::defaults();
  EXPECT_NO_THROW(b.validate());
  EXPECT_GT(b.box[kSigmaIndex].lo, 0.0);
  EXPECT_EQ(b.box[kDepreciationIndex].lo, 0.1);
  EXPECT_EQ(b.box[kDepreciationIndex].hi, 0.5);
  EXPECT_LE(b.box[param_index(Coef::grant_lag)].hi, 0.0);
  EXPECT_GE(b.box[param_index(Coef::tech_scope)].lo, 0.0);
  EXPECT_GE(b.box[param_index(Coef::family_size)].lo, 0.0);
  EXPECT_GE(b.box[param_index(Coef::inventor_size)].lo, 0.0);
}

TEST(ParamBounds, RejectsBrokenBoxes) {
  ParamBounds b = ParamBounds::defaults();
  b.box[kSigmaIndex].lo = 0.0;
  EXPECT_THROW(b.validate(), ConfigurationError);
  b = ParamBounds::defaults();
  b.box[param_index(Coef::grant_lag)].hi = 1.0;
  EXPECT_THROW(b.validate(), ConfigurationError);
  b = ParamBounds::defaults();
  b.box[3] = {2.0, 1.0};
  EXPECT_THROW(b.validate(), ConfigurationError);
}

TEST(ParamBounds, ClipLandsInside) {
  const ParamBounds b = ParamBounds::defaults();
  ParamVector v{};
  v.fill(1e9);
  EXPECT_TRUE(b.contains(b.clip(v)));
  v.fill(-1e9);
  EXPECT_TRUE(b.contains(b.clip(v)));
}

TEST(GaConfig, Validation) {
  GaConfig ga;
  EXPECT_NO_THROW(ga.validate());
  ga.elite_size = ga.population_size + 1;
  EXPECT_THROW(ga.validate(), ConfigurationError);
  ga = GaConfig{};
  ga.mutation_rate = 1.5;
  EXPECT_THROW(ga.validate(), ConfigurationError);
  ga = GaConfig{};
  ga.starts = 0;
  EXPECT_THROW(ga.validate(), ConfigurationError);
}

TEST(Estimate, PointBoxReturnsThePointWithZeroDispersion) {
  const auto records = cohort(200, 1);
  const ModelParams truth = fixtures::recovery_params();
  for (auto kind : {GaEncodingKind::natural, GaEncodingKind::standardized}) {
    GaConfig ga = small_ga(5);
    ga.encoding = kind;
    const EstimationResult r = estimate(records, kIndia, ModelConfig{}, ga, ParamBounds::point(truth));
    const ParamVector got = to_vector(r.point_estimate);
    const ParamVector want = to_vector(truth);
    for (std::size_t i = 0; i < kParamCount; ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-12 * std::max(1.0, std::abs(want[i]))) << param_name(i);
      EXPECT_NEAR(r.std_errors[i], 0.0, 1e-12) << param_name(i);
    }
  }
}

TEST(Estimate, DeterministicAcrossThreadCounts) {
  const auto records = cohort(300, 2);
  const GaConfig ga = small_ga(17);
  const auto bounds = ParamBounds::defaults();
  const EstimationResult a = estimate(records, kIndia, ModelConfig{}, ga, bounds, {.threads = 1});
  const EstimationResult b = estimate(records, kIndia, ModelConfig{}, ga, bounds, {.threads = 4});
  EXPECT_EQ(a.point_estimate, b.point_estimate);
  EXPECT_EQ(a.point_log_likelihood, b.point_log_likelihood);
  EXPECT_EQ(a.best.params, b.best.params);
  EXPECT_EQ(a.std_errors, b.std_errors);
}

TEST(Estimate, EliteSortedInsideBoundsAndTrajectoriesNondecreasing) {
  const auto records = cohort(300, 3);
  const GaConfig ga = small_ga(23);
  const auto bounds = ParamBounds::defaults();
  std::size_t observed = 0;
  EstimateOptions opts;
  opts.observer = [&](std::size_t, std::size_t, std::span<const ScoredParams> pop) {
    ++observed;
    for (const auto& s : pop) ASSERT_TRUE(bounds.contains(to_vector(s.params)));
  };
  const EstimationResult r = estimate(records, kIndia, ModelConfig{}, ga, bounds, opts);
  EXPECT_EQ(observed, ga.starts * (ga.generations + 1));
  ASSERT_EQ(r.elite.size(), ga.elite_size);
  for (std::size_t i = 1; i < r.elite.size(); ++i)
    EXPECT_GE(r.elite[i - 1].log_likelihood, r.elite[i].log_likelihood);
  EXPECT_EQ(r.best.log_likelihood, r.elite.front().log_likelihood);
  ASSERT_EQ(r.starts.size(), ga.starts);
  for (const auto& s : r.starts) {
    ASSERT_EQ(s.best_trajectory.size(), ga.generations + 1);
    for (std::size_t g = 1; g < s.best_trajectory.size(); ++g)
      EXPECT_GE(s.best_trajectory[g], s.best_trajectory[g - 1]);
  }
  const LikelihoodEvaluator eval(records, kIndia, ModelConfig{});
  EXPECT_NEAR(eval(r.point_estimate).value, r.point_log_likelihood, 1e-9 * std::abs(r.point_log_likelihood));
}

TEST(Estimate, RejectsDegenerateData) {
  auto records = cohort(40, 4);
  EXPECT_THROW(estimate(records, kIndia, ModelConfig{}, small_ga(1), ParamBounds::defaults()),
               DegenerateDataError);
  records = cohort(100, 4);
  for (auto& r : records) r.expiry_age = 9;
  EXPECT_THROW(estimate(records, kIndia, ModelConfig{}, small_ga(1), ParamBounds::defaults()),
               DegenerateDataError);
}

TEST(GeneticSearch, ClimbsAQuadratic) {
  ParamVector peak{};
  peak[kSigmaIndex] = 2.0;
  peak[kDepreciationIndex] = 0.3;
  peak[param_index(Coef::intercept)] = 1.5;
  peak[param_index(Coef::grant_lag)] = -0.5;
  peak[param_index(Coef::family_size)] = 0.4;
  GaConfig ga = small_ga(9);
  ga.generations = 30;
  const EstimationResult r = run_genetic_search(quadratic(peak), ga, ParamBounds::defaults());
  const ParamVector best = to_vector(r.best.params);
  EXPECT_GT(r.best.log_likelihood, -0.5);
  EXPECT_NEAR(best[kDepreciationIndex], 0.3, 0.1);
}

TEST(Refine, ReachesQuadraticPeakAndNeverLosesGround) {
  ParamVector peak{};
  peak[kSigmaIndex] = 2.0;
  peak[kDepreciationIndex] = 0.3;
  peak[param_index(Coef::intercept)] = 1.5;
  peak[param_index(Coef::grant_lag)] = -0.5;
  const Objective f = quadratic(peak);
  ParamVector start = peak;
  start[kSigmaIndex] = 5.0;
  start[kDepreciationIndex] = 0.45;
  start[param_index(Coef::intercept)] = -3.0;
  const ParamVector out = refine_coordinatewise(f, start, ParamBounds::defaults(), {1e-12, 200});
  for (std::size_t i = 0; i < kParamCount; ++i) EXPECT_NEAR(out[i], peak[i], 1e-4) << param_name(i);
  EXPECT_GE(f(out), f(start));
}

TEST(Refine, ProfileRefineImprovesOnBest) {
  const auto records = cohort(300, 5);
  const auto bounds = ParamBounds::defaults();
  EstimationResult r = estimate(records, kIndia, ModelConfig{}, small_ga(31), bounds);
  const double best = r.best.log_likelihood;
  r = profile_refine(std::move(r), records, kIndia, ModelConfig{}, bounds);
  ASSERT_TRUE(r.refined.has_value());
  EXPECT_GE(r.refined->log_likelihood, best);
  EXPECT_TRUE(bounds.contains(to_vector(r.refined->params)));
  EXPECT_EQ(r.best.log_likelihood, best);
}
