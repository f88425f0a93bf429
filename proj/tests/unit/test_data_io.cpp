#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "patent_rent/data_io.hpp"
#include "patent_rent/errors.hpp"
#include "patent_rent/likelihood.hpp"

using namespace patent_rent;

namespace {

constexpr const char* kHeader =
    "patent_id,application_year,expiry_age,family_size,inventor_count,grant_lag_years,tech_scope,"
    "tech_field,ownership,censored\n";

}  // namespace

TEST(ParseRecords, ThreeValidRows) {
  const std::string text = std::string(kHeader) +
                           "IN1,1999,2,3,2,7,1,chemical,domestic,false\n"
                           "IN2,2000,20,0,1,5.5,2,Electrical,foreign_subsidiary,false\n"
                           "IN3,2001,9,12,4,3,1,others,domestic,FALSE\n";
  const ParsedRecords p = parse_records(text);
  ASSERT_EQ(p.records.size(), 3u);
  EXPECT_EQ(p.report.accepted, 3u);
  EXPECT_TRUE(p.report.rejected.empty());
  EXPECT_EQ(p.records[1].covariates.tech_field, TechField::electrical);
  EXPECT_EQ(p.records[1].covariates.ownership, Ownership::foreign_subsidiary);
  EXPECT_EQ(p.records[1].raw_tech_field, "Electrical");
  EXPECT_EQ(p.records[1].covariates.grant_lag, 5.5);
  EXPECT_EQ(p.records[2].expiry_age, 9);
}

TEST(ParseRecords, BadRowsAreRejectedIndividually) {
  const std::string text = std::string(kHeader) +
                           "A,1999,25,3,2,7,1,chemical,domestic,false\n"
                           "B,1999,5,3,0,7,1,chemical,domestic,false\n"
                           "C,1999,5,3,2,7,1,chemistry,domestic,false\n"
                           "D,1999,5,3,2,7,1,chemical,domestic,false\n"
                           "D,1999,6,3,2,7,1,chemical,domestic,false\n"
                           "E,1999,5,3,2\n";
  const ParsedRecords p = parse_records(text);
  EXPECT_EQ(p.report.accepted, 1u);
  ASSERT_EQ(p.report.rejected.size(), 5u);
  EXPECT_EQ(p.report.accepted + p.report.rejected.size(), 6u);
  EXPECT_EQ(p.report.rejected[0].row, 1u);
  EXPECT_NE(p.report.rejected[0].reason.find("expiry_age 25"), std::string::npos);
  EXPECT_NE(p.report.rejected[1].reason.find("inventor_count"), std::string::npos);
  EXPECT_NE(p.report.rejected[2].reason.find("chemistry"), std::string::npos);
  EXPECT_NE(p.report.rejected[3].reason.find("duplicate"), std::string::npos);
}

TEST(ParseRecords, CensoredRowIsDroppedWithOneWarning) {
  const std::string text = std::string(kHeader) +
                           "A,1999,5,3,2,7,1,chemical,domestic,false\n"
                           "B,1999,20,3,2,7,1,chemical,domestic,true\n";
  const ParsedRecords p = parse_records(text);
  EXPECT_EQ(p.report.accepted, 1u);
  EXPECT_EQ(p.report.rejected.size(), 1u);
  EXPECT_EQ(p.report.warnings.size(), 1u);
}

TEST(ParseRecords, MissingColumnNamesIt) {
  const std::string text = "patent_id,application_year,expiry_age\nA,1999,5\n";
  try {
    parse_records(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'family_size'"), std::string::npos);
    EXPECT_EQ(e.violations().size(), 7u);
  }
}

TEST(ParseRecords, IpcPrefixMapResolvesRawCodes) {
  const IpcPrefixMap map = IpcPrefixMap::parse("# ipc\nC07D = chemical\nH04L = electrical\n");
  const std::string text = std::string(kHeader) + "A,1999,5,3,2,7,1,C07D 401/04,domestic,false\n";
  EXPECT_EQ(parse_records(text).report.accepted, 0u);
  const ParsedRecords p = parse_records(text, &map);
  ASSERT_EQ(p.records.size(), 1u);
  EXPECT_EQ(p.records[0].covariates.tech_field, TechField::chemical);
}

TEST(SerializeRecords, ParseSerializeIsIdentity) {
  const auto synth = generate_synthetic(fixtures::recovery_params(), 300, builtin_schedule("india"),
                                        ModelConfig{}, CovariateSpec::indian_cohort_defaults(), 12);
  const ParsedRecords first = parse_records(serialize_records(synth));
  ASSERT_EQ(first.records.size(), synth.size());
  const std::string text = serialize_records(first.records);
  const ParsedRecords second = parse_records(text);
  EXPECT_EQ(second.records, first.records);
  EXPECT_EQ(serialize_records(second.records), text);
  for (std::size_t i = 0; i < synth.size(); ++i) {
    EXPECT_EQ(first.records[i].expiry_age, synth[i].expiry_age);
    EXPECT_EQ(first.records[i].covariates.family_size, synth[i].covariates.family_size);
    EXPECT_EQ(first.records[i].covariates.tech_field, synth[i].covariates.tech_field);
  }
}

TEST(Synthetic, DeterministicAndValid) {
  const auto india = builtin_schedule("india");
  const auto spec = CovariateSpec::indian_cohort_defaults();
  const auto a = generate_synthetic(fixtures::reference_params(), 500, india, ModelConfig{}, spec, 3);
  const auto b = generate_synthetic(fixtures::reference_params(), 500, india, ModelConfig{}, spec, 3);
  EXPECT_EQ(a, b);
  for (const auto& r : a) {
    EXPECT_GE(r.expiry_age, 2);
    EXPECT_LE(r.expiry_age, 20);
    EXPECT_NE(r.expiry_age, 3);
    EXPECT_NO_THROW(r.covariates.validate());
  }
}

TEST(Synthetic, ExpiryFrequenciesFollowTheModel) {
  const auto india = builtin_schedule("india");
  const ModelParams p = fixtures::recovery_params();
  CovariateSpec spec = CovariateSpec::indian_cohort_defaults();
  using K = CountDistribution::Kind;
  spec.family_size = {K::constant, 2.0, 0.0, 2.0, std::nullopt};
  spec.inventor_size = {K::constant, 1.0, 0.0, 1.0, std::nullopt};
  spec.grant_lag = {K::constant, 6.0, 0.0, 6.0, std::nullopt};
  spec.tech_scope = {K::constant, 1.0, 0.0, 1.0, std::nullopt};
  spec.field_weights = {0.0, 1.0, 0.0, 0.0, 0.0};
  constexpr std::size_t n = 40000;
  const auto cohort = generate_synthetic(p, n, india, ModelConfig{}, spec, 8);
  std::map<int, double> counts;
  for (const auto& r : cohort) counts[r.expiry_age] += 1.0;
  const ExpiryPmf pmf = expiry_pmf(p, cohort.front().covariates, india, ModelConfig{});
  for (int age = 2; age <= 20; ++age) {
    const double q = pmf.at(age);
    EXPECT_NEAR(counts[age] / n, q, 4.0 * std::sqrt(q * (1 - q) / n) + 1e-12) << age;
  }
}

TEST(CovariateSpec, ValidatesRanges) {
  CovariateSpec s = CovariateSpec::indian_cohort_defaults();
  EXPECT_NO_THROW(s.validate());
  s.field_weights = {};
  EXPECT_THROW(s.validate(), ConfigurationError);
  s = CovariateSpec::indian_cohort_defaults();
  s.foreign_share = 1.5;
  EXPECT_THROW(s.validate(), ConfigurationError);
}

TEST(Summarize, Cases) {
  const std::vector<double> one = {4.0};
  const SummaryStats a = summarize(one);
  EXPECT_EQ(a.count, 1u);
  EXPECT_EQ(a.mean, 4.0);
  EXPECT_EQ(a.sd, 0.0);
  const std::vector<double> xs = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const SummaryStats b = summarize(xs);
  EXPECT_DOUBLE_EQ(b.mean, 5.0);
  EXPECT_NEAR(b.sd, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(b.min, 2.0);
  EXPECT_EQ(b.max, 9.0);
  EXPECT_EQ(summarize(std::span<const double>{}).count, 0u);
}

TEST(DescriptiveStats, GroupsAndCorrelations) {
  const auto cohort = generate_synthetic(fixtures::reference_params(), 2000, builtin_schedule("india"),
                                         ModelConfig{}, CovariateSpec::indian_cohort_defaults(), 4);
  const DescriptiveStats s = descriptive_stats(cohort);
  EXPECT_EQ(s.overall.observations, 2000u);
  std::size_t total = 0;
  for (const auto& g : s.by_field) total += g.observations;
  EXPECT_EQ(total, 2000u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(s.correlations[i][i], 1.0, 1e-12);
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(s.correlations[i][j], s.correlations[j][i], 1e-15);
  }
  EXPECT_THROW(descriptive_stats(std::span<const PatentRecord>{}), DomainError);
  const std::string csv = descriptive_stats_csv(s);
  EXPECT_EQ(csv.rfind("group,variable,count,mean,sd,min,max", 0), 0u);
}
