#include <gtest/gtest.h>

#include "patent_rent/errors.hpp"
#include "patent_rent/fee_schedule.hpp"

using namespace patent_rent;

TEST(FeeSchedule, BuiltinFeeLevels) {
  const FeeSchedule india = builtin_schedule("india");
  EXPECT_DOUBLE_EQ(india.cost_at(5), 54.81);
  EXPECT_DOUBLE_EQ(india.cost_at(2), 0.0);
  EXPECT_DOUBLE_EQ(india.cost_at(12), 328.86);
  EXPECT_DOUBLE_EQ(india.cost_at(20), 548.10);
  EXPECT_DOUBLE_EQ(builtin_schedule("china").cost_at(17), 1200.0);
  const FeeSchedule us = builtin_schedule("us");
  EXPECT_DOUBLE_EQ(us.cost_at(9), 3600.0);
  EXPECT_DOUBLE_EQ(us.cost_at(2), 0.0);
  EXPECT_DOUBLE_EQ(us.cost_at(16), 0.0);
}

TEST(FeeSchedule, CostIsTotalOverTermAndRejectsOutside) {
  for (const auto& name : builtin_schedule_names()) {
    const FeeSchedule s = builtin_schedule(name);
    for (int age = 1; age <= s.max_term(); ++age) EXPECT_NO_THROW(s.cost_at(age));
    EXPECT_THROW(s.cost_at(0), DomainError);
    EXPECT_THROW(s.cost_at(s.max_term() + 1), DomainError);
  }
}

TEST(FeeSchedule, BuiltinsAreNondecreasingOverCoveredAges) {
  for (const auto& name : builtin_schedule_names()) {
    const FeeSchedule s = builtin_schedule(name);
    EXPECT_TRUE(s.is_nondecreasing()) << name;
    double prev = 0.0;
    for (const auto& e : s.entries()) {
      for (int age = e.age_from; age <= e.age_to; ++age) {
        EXPECT_GE(s.cost_at(age), prev);
        prev = s.cost_at(age);
      }
    }
  }
}

TEST(FeeSchedule, FirstFeeAge) {
  EXPECT_EQ(builtin_schedule("india").first_fee_age(), 3);
  EXPECT_EQ(builtin_schedule("china").first_fee_age(), 1);
  EXPECT_EQ(builtin_schedule("us").first_fee_age(), 4);
}

TEST(FeeSchedule, LoadSerializeRoundTrip) {
  for (const auto& name : builtin_schedule_names()) {
    const FeeSchedule s = builtin_schedule(name);
    const FeeSchedule loaded = load_schedule(serialize_schedule(s));
    EXPECT_EQ(loaded, s) << name;
    EXPECT_EQ(serialize_schedule(loaded), serialize_schedule(s));
  }
}

TEST(FeeSchedule, HandWrittenIndiaDocumentEqualsBuiltin) {
  const char* doc = R"(# Indian Patent Office renewal fees
name = india
currency = USD
max_term = 20
entry = {3, 6, 54.81}
entry = {7, 10, 164.43}
entry = {11, 15, 328.86}   # mid-life
entry = {16, 20, 548.10}
)";
  EXPECT_EQ(load_schedule(doc), builtin_schedule("india"));
}

TEST(FeeSchedule, OverlapIsRejected) {
  const char* doc = "name = x\ncurrency = USD\nmax_term = 20\nentry = {3, 6, 10}\nentry = {5, 10, 20}\n";
  try {
    load_schedule(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("overlaps"), std::string::npos) << e.what();
  }
}

TEST(FeeSchedule, NegativeCostIsRejected) {
  const char* doc = "name = x\ncurrency = USD\nmax_term = 20\nentry = {3, 6, -5}\n";
  try {
    load_schedule(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("negative cost"), std::string::npos) << e.what();
  }
}

TEST(FeeSchedule, AllViolationsReportedTogether) {
  const char* doc = "name = x\ncurrency = usd\nmax_term = 20\nentry = {3, 25, -1}\nbogus = 1\n";
  try {
    load_schedule(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.violations().size(), 4u);
  }
}

TEST(FeeSchedule, UnknownBuiltinThrows) { EXPECT_THROW(builtin_schedule("mars"), DomainError); }
