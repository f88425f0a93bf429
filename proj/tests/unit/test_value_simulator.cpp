#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "patent_rent/errors.hpp"
#include "patent_rent/likelihood.hpp"
#include "patent_rent/value_simulator.hpp"

using namespace patent_rent;

namespace {

const FeeSchedule kIndia = builtin_schedule("india");
const FeeSchedule kFree("free", "USD", {});

PatentRecord record_at(int age, std::string id = "p") {
  PatentRecord r;
  r.patent_id = std::move(id);
  r.expiry_age = age;
  r.covariates.family_size = 2;
  r.covariates.grant_lag = 6;
  r.covariates.tech_field = TechField::mechanical;
  return r;
}

}  // namespace

TEST(EpsilonBounds, CellsShiftedByTheIndex) {
  const ModelParams p = fixtures::recovery_params();
  const PatentRecord r = record_at(7);
  const ThresholdTable t = build_threshold_table(kIndia, p.d, ModelConfig{});
  const double mu = linear_index(p.beta, r.covariates);
  const EpsilonInterval mid = epsilon_bounds(p, r.covariates, 7, kIndia, ModelConfig{});
  EXPECT_DOUBLE_EQ(mid.lower, t.at(6) - mu);
  EXPECT_DOUBLE_EQ(mid.upper, t.at(7) - mu);
  const EpsilonInterval never = epsilon_bounds(p, r.covariates, 2, kIndia, ModelConfig{});
  EXPECT_EQ(never.lower, -INFINITY);
  EXPECT_DOUBLE_EQ(never.upper, t.at(2) - mu);
  const EpsilonInterval full = epsilon_bounds(p, r.covariates, 20, kIndia, ModelConfig{});
  EXPECT_DOUBLE_EQ(full.lower, t.at(19) - mu);
  EXPECT_EQ(full.upper, INFINITY);
}

TEST(EpsilonBounds, EmptyCellUnderFirstFeeRuleIsDegenerate) {
  const ModelParams p = fixtures::recovery_params();
  const EpsilonInterval e = epsilon_bounds(p, record_at(3).covariates, 3, kIndia, ModelConfig{});
  EXPECT_EQ(e.lower, e.upper);
}

TEST(TruncatedNormal, DrawsStayInsideInterval) {
  for (const EpsilonInterval iv : {EpsilonInterval{-INFINITY, -3.0}, EpsilonInterval{0.5, 0.7},
                                   EpsilonInterval{20.0, INFINITY}, EpsilonInterval{-40.0, -39.0}}) {
    for (double x : sample_truncated_normal(2.0, iv, 5000, 77)) {
      ASSERT_GE(x, iv.lower);
      ASSERT_LE(x, iv.upper);
    }
  }
}

TEST(TruncatedNormal, HalfNormalMean) {
  const double sigma = 1.7;
  const auto x = sample_truncated_normal(sigma, {0.0, INFINITY}, 200000, 5);
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  const double expect = sigma * std::sqrt(2.0 / std::numbers::pi);
  const double se = sigma * std::sqrt((1.0 - 2.0 / std::numbers::pi) / static_cast<double>(x.size()));
  EXPECT_NEAR(m, expect, 4.0 * se);
}

TEST(TruncatedNormal, MatchesOracleMomentsOnABoundedInterval) {
  const auto x = sample_truncated_normal(6.07, {1.0, 2.0}, 100000, 9);
  const oracle::Moments ref = oracle::truncated_normal_moments(6.07, 1.0, 2.0);
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  EXPECT_NEAR(m, ref.mean, 4.0 * std::sqrt(ref.variance / static_cast<double>(x.size())));
}

TEST(TruncatedNormal, DeterministicAndRejectsBadInput) {
  EXPECT_EQ(sample_truncated_normal(1.0, {0.0, 1.0}, 50, 3), sample_truncated_normal(1.0, {0.0, 1.0}, 50, 3));
  EXPECT_NE(sample_truncated_normal(1.0, {0.0, 1.0}, 50, 3), sample_truncated_normal(1.0, {0.0, 1.0}, 50, 4));
  EXPECT_THROW(sample_truncated_normal(0.0, {0.0, 1.0}, 5, 1), DomainError);
  EXPECT_THROW(sample_truncated_normal(1.0, {2.0, 1.0}, 5, 1), SamplingError);
  EXPECT_THROW(sample_truncated_normal(1.0, {1e6, INFINITY}, 5, 1), SamplingError);
}

TEST(SimulateInitialReturn, NeverRenewedMedianBelowFirstCutpoint) {
  const ModelParams p = fixtures::reference_params();
  const PatentRecord r = record_at(2);
  const ValueEstimate v = simulate_initial_return(p, r, kIndia, ModelConfig{}, 4000, 1);
  const double cap = std::exp(build_threshold_table(kIndia, p.d, ModelConfig{}).at(2));
  EXPECT_LT(v.r0_median, cap);
  EXPECT_LT(v.r0_mean, cap);
  EXPECT_EQ(v.draws_used, 4000u);
  EXPECT_TRUE(v.mc_reliable);
  ASSERT_EQ(v.r0_quantiles.size(), std::size(kReportedQuantiles));
  for (std::size_t i = 1; i < v.r0_quantiles.size(); ++i)
    EXPECT_LE(v.r0_quantiles[i - 1].second, v.r0_quantiles[i].second);
  EXPECT_DOUBLE_EQ(v.npv_mean, net_present_value(v.r0_mean, p.d, kIndia, ModelConfig{}, 2));
}

TEST(SimulateInitialReturn, FullTermLiesAboveLastCutpoint) {
  const ModelParams p = fixtures::recovery_params();
  const ValueEstimate v = simulate_initial_return(p, record_at(20), kIndia, ModelConfig{}, 2000, 2);
  const double floor = build_threshold_table(kIndia, p.d, ModelConfig{}).at(19);
  EXPECT_GE(v.log_r0_mean, floor);
  EXPECT_GE(v.r0_quantiles.front().second, std::exp(floor) * (1 - 1e-12));
}

TEST(SimulateInitialReturn, FewDrawsAreFlaggedUnreliable) {
  const ValueEstimate v =
      simulate_initial_return(fixtures::recovery_params(), record_at(9), kIndia, ModelConfig{}, 1, 3);
  EXPECT_FALSE(v.mc_reliable);
  EXPECT_EQ(v.draws_used, 1u);
}

TEST(NetPresentValue, WorkedExamples) {
  ModelConfig cfg;
  // One year at 110 with no depreciation discounts to 100.
  EXPECT_NEAR(net_present_value(110.0, 0.0, kFree, cfg, 1), 100.0, 1e-12);
  const double fees = 54.81 / std::pow(1.1, 3) + 54.81 / std::pow(1.1, 4) + 54.81 / std::pow(1.1, 5);
  EXPECT_NEAR(net_present_value(0.0, 0.3, kIndia, cfg, 5), -fees, 1e-12);
  EXPECT_NEAR(net_present_value(0.0, 0.3, kIndia, cfg, 5), -112.648, 5e-4);
  cfg.discount_rate = 0.0;
  for (int T = 1; T <= 20; ++T) EXPECT_NEAR(net_present_value(7.0, 0.0, kFree, cfg, T), 7.0 * T, 1e-12);
}

TEST(NetPresentValue, MatchesRecursionAndGrowsWithR0) {
  Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    const double r0 = rng.uniform(0.0, 5000.0);
    const double d = rng.uniform(0.05, 0.6);
    const int T = 1 + static_cast<int>(rng.index(20));
    const double v = net_present_value(r0, d, kIndia, ModelConfig{}, T);
    EXPECT_NEAR(v, oracle::npv_recursive(r0, d, kIndia, 0.1, T), 1e-9 * std::max(1.0, std::abs(v)));
    EXPECT_GT(net_present_value(r0 + 1.0, d, kIndia, ModelConfig{}, T), v);
  }
}

TEST(NetPresentValue, CostsOnlyDiscounting) {
  ModelConfig cfg;
  cfg.discount_costs_only = true;
  EXPECT_NEAR(net_present_value(110.0, 0.0, kFree, cfg, 1), 110.0, 1e-12);
}

TEST(NetPresentValue, RejectsBadAgeAndRate) {
  EXPECT_THROW(net_present_value(1.0, 0.3, kIndia, ModelConfig{}, 0), DomainError);
  EXPECT_THROW(net_present_value(1.0, 0.3, kIndia, ModelConfig{}, 21), DomainError);
  ModelConfig cfg;
  cfg.discount_rate = -1.0;
  EXPECT_THROW(net_present_value(1.0, 0.3, kIndia, cfg, 5), DomainError);
}

TEST(Ensemble, IdenticalParametersGiveABandOfPureMcNoise) {
  const ModelParams p = fixtures::recovery_params();
  const std::vector<ModelParams> elite(50, p);
  const PatentRecord r = record_at(8);
  const EnsembleSummary s = ensemble_value(elite, r, kIndia, ModelConfig{}, 2000, 6);
  EXPECT_EQ(s.realizations, 50u);
  EXPECT_EQ(s.skipped, 0u);
  const EpsilonInterval iv = epsilon_bounds(p, r.covariates, 8, kIndia, ModelConfig{});
  const double var = oracle::truncated_normal_moments(p.sigma, iv.lower, iv.upper).variance;
  EXPECT_LT(s.band_upper - s.band_lower, 5.0 * std::sqrt(var / 2000.0));
  EXPECT_LE(s.band_lower, s.log_r0);
  EXPECT_GE(s.band_upper, s.log_r0);
}

TEST(Ensemble, TooManyInvalidVectorsThrows) {
  ModelParams ok = fixtures::recovery_params();
  ModelParams bad = ok;
  bad.sigma = 1e-3;
  bad[Coef::intercept] = -500.0;
  std::vector<ModelParams> elite(8, ok);
  elite.insert(elite.end(), 2, bad);
  EXPECT_THROW(ensemble_value(elite, record_at(20), kIndia, ModelConfig{}, 100, 1), EnsembleError);
  elite.assign(19, ok);
  elite.push_back(bad);
  const EnsembleSummary s = ensemble_value(elite, record_at(20), kIndia, ModelConfig{}, 100, 1);
  EXPECT_EQ(s.skipped, 1u);
  EXPECT_EQ(s.realizations, 19u);
}

TEST(SimulateValues, IndependentOfOrderAndThreads) {
  std::vector<PatentRecord> records;
  for (int i = 0; i < 30; ++i) records.push_back(record_at(4 + i % 17, "id" + std::to_string(i)));
  ValueRunOptions opts;
  opts.draws = 300;
  opts.seed = 99;
  opts.elite = {fixtures::recovery_params(), fixtures::recovery_params()};
  opts.ensemble_draws = 50;
  const ModelParams p = fixtures::recovery_params();
  const auto a = simulate_values(p, records, kIndia, ModelConfig{}, opts);
  opts.threads = 4;
  std::reverse(records.begin(), records.end());
  auto b = simulate_values(p, records, kIndia, ModelConfig{}, opts);
  std::reverse(b.begin(), b.end());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].patent_id, b[i].patent_id);
    EXPECT_EQ(a[i].r0_mean, b[i].r0_mean);
    ASSERT_TRUE(a[i].ensemble && b[i].ensemble);
    EXPECT_EQ(a[i].ensemble->log_r0, b[i].ensemble->log_r0);
  }
}

TEST(QuantileSorted, RType7) {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(x, 0.25), 1.75);
  const std::vector<double> one = {5.0};
  EXPECT_DOUBLE_EQ(quantile_sorted(one, 0.3), 5.0);
}
