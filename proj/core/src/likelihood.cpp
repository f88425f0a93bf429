#include "patent_rent/likelihood.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "patent_rent/errors.hpp"
#include "patent_rent/normal.hpp"

namespace patent_rent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_age(int expiry_age, const ModelConfig& config) {
  if (expiry_age < config.min_age || expiry_age > config.max_term)
    throw DomainError(fmt::format("expiry age {} outside [{}, {}]", expiry_age, config.min_age,
                                  config.max_term));
}

double cell_log_probability(const ThresholdTable& table, double mu, double sigma, int age) {
  const CellBounds b = cell_bounds(table, age);
  const double p = normal_interval_mass((b.lower - mu) / sigma, (b.upper - mu) / sigma);
  return std::log(p > kProbabilityFloor ? p : kProbabilityFloor);
}

}  // namespace

ThresholdTable build_threshold_table(const FeeSchedule& schedule, double d, const ModelConfig& config) {
  if (schedule.max_term() < config.max_term)
    throw ConfigurationError(fmt::format("schedule '{}' covers ages up to {} but the model runs to {}",
                                         schedule.name(), schedule.max_term(), config.max_term));
  const auto first = schedule.first_fee_age();
  if (!first || *first >= config.max_term)
    throw ConfigurationError(
        fmt::format("schedule '{}' has no fee-bearing decision age", schedule.name()));

  ThresholdTable table;
  table.min_age = config.min_age;
  const double first_threshold = threshold(schedule, d, config, std::max(*first, config.min_age));
  for (int age = config.min_age; age < config.max_term; ++age) {
    double value;
    if (age < *first) {
      value = first_threshold;
      if (age == config.min_age && config.never_renewed == NeverRenewedRule::first_fee_at_min_age)
        value = std::log(schedule.cost_at(*first) / z_factor(d, config.discount_rate, age));
    } else {
      value = threshold(schedule, d, config, age);
    }
    if (!table.values.empty() && value < table.values.back()) table.monotone = false;
    table.values.push_back(value);
  }
  return table;
}

CellBounds cell_bounds(const ThresholdTable& table, int expiry_age) {
  const int top = table.max_age() + 1;
  if (expiry_age < table.min_age || expiry_age > top)
    throw DomainError(fmt::format("expiry age {} outside [{}, {}]", expiry_age, table.min_age, top));
  const double lower = expiry_age == table.min_age ? -kInf : table.at(expiry_age - 1);
  const double upper = expiry_age == top ? kInf : table.at(expiry_age);
  return {lower, upper};
}

ExpiryPmf expiry_pmf(const ModelParams& params, const CovariateVector& x,
                     const FeeSchedule& schedule, const ModelConfig& config) {
  params.validate();
  const ThresholdTable table = build_threshold_table(schedule, params.d, config);
  const double mu = linear_index(params.beta, x, config.transform);

  ExpiryPmf pmf;
  pmf.min_age = config.min_age;
  pmf.non_monotone_warning = !table.monotone;
  for (int age = config.min_age; age <= config.max_term; ++age) {
    const CellBounds b = cell_bounds(table, age);
    pmf.probabilities.push_back(
        normal_interval_mass((b.lower - mu) / params.sigma, (b.upper - mu) / params.sigma));
  }
  return pmf;
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

LogLikelihood log_likelihood(const ModelParams& params, std::span<const PatentRecord> records,
                             const FeeSchedule& schedule, const ModelConfig& config) {
  if (records.empty()) throw DomainError("log-likelihood of an empty record list");
  params.validate();
  const ThresholdTable table = build_threshold_table(schedule, params.d, config);
  std::vector<double> terms;
  terms.reserve(records.size());
  for (const auto& r : records) {
    check_age(r.expiry_age, config);
    const double mu = linear_index(params.beta, r.covariates, config.transform);
    terms.push_back(cell_log_probability(table, mu, params.sigma, r.expiry_age));
  }
  return {pairwise_sum(terms), !table.monotone};
}

double round_significant(double value, int digits) noexcept {
  if (value == 0.0 || !std::isfinite(value)) return value;
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  const double scale = std::pow(10.0, digits - 1 - exponent);
  return std::round(value * scale) / scale;
}

LikelihoodEvaluator::LikelihoodEvaluator(std::span<const PatentRecord> records,
                                         const FeeSchedule& schedule, const ModelConfig& config)
    : schedule_(schedule), config_(config) {
  if (records.empty()) throw DomainError("log-likelihood of an empty record list");
  rows_.reserve(records.size());
  ages_.reserve(records.size());
  for (const auto& r : records) {
    check_age(r.expiry_age, config);
    rows_.push_back(design_row(r.covariates, config.transform));
    ages_.push_back(r.expiry_age);
  }
  // Fail early on schedules that cannot produce a ladder at all.
  (void)build_threshold_table(schedule_, 0.1, config_);
}

std::shared_ptr<const ThresholdTable> LikelihoodEvaluator::table_for(double d) const {
  const double key = round_significant(d, 12);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto table = std::make_shared<const ThresholdTable>(build_threshold_table(schedule_, key, config_));
  std::lock_guard lock(cache_mutex_);
  if (cache_.size() > 8192) cache_.clear();
  return cache_.emplace(key, std::move(table)).first->second;
}

LogLikelihood LikelihoodEvaluator::operator()(const ModelParams& params) const {
  params.validate();
  const auto table = table_for(params.d);
  thread_local std::vector<double> terms;
  terms.resize(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Coefficients& row = rows_[i];
    double mu = 0.0;
    for (std::size_t k = 0; k < kCoefCount; ++k) mu += params.beta[k] * row[k];
    terms[i] = cell_log_probability(*table, mu, params.sigma, ages_[i]);
  }
  return {pairwise_sum(terms), !table->monotone};
}

}  // namespace patent_rent
