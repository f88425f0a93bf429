#include "patent_rent/value_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "patent_rent/errors.hpp"
#include "patent_rent/likelihood.hpp"
#include "patent_rent/normal.hpp"
#include "patent_rent/parallel.hpp"
#include "patent_rent/random.hpp"

namespace patent_rent {

namespace {

double mean_of(std::span<const double> v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

// Present value of one unit of r(0) over ages 1..T.
double return_annuity(double d, const ModelConfig& config, int expiry_age) {
  double acc = 0.0;
  for (int t = 1; t <= expiry_age; ++t) {
    const double flow = std::exp(-d * t);
    acc += config.discount_costs_only ? flow : flow * std::pow(1.0 + config.discount_rate, -t);
  }
  return acc;
}

}  // namespace

EpsilonInterval epsilon_bounds(const ModelParams& params, const CovariateVector& x, int expiry_age,
                               const FeeSchedule& schedule, const ModelConfig& config) {
  params.validate();
  const ThresholdTable table = build_threshold_table(schedule, params.d, config);
  const CellBounds cell = cell_bounds(table, expiry_age);
  const double mu = linear_index(params.beta, x, config.transform);
  const EpsilonInterval out{cell.lower - mu, cell.upper - mu};
  if (out.lower > out.upper)
    throw ModelValidityError(fmt::format(
        "cutpoints invert at expiry age {}: epsilon interval [{}, {}] is empty", expiry_age,
        out.lower, out.upper));
  return out;
}

std::vector<double> sample_truncated_normal(double sigma, EpsilonInterval interval, std::size_t n,
                                            std::uint64_t seed) {
  if (!(std::isfinite(sigma) && sigma > 0.0))
    throw DomainError(fmt::format("truncated normal needs sigma > 0 (got {})", sigma));
  if (n < 1) throw DomainError("truncated normal needs at least one draw");
  if (std::isnan(interval.lower) || std::isnan(interval.upper) || interval.lower > interval.upper)
    throw SamplingError(
        fmt::format("invalid interval [{}, {}]", interval.lower, interval.upper));

  double a = interval.lower / sigma;
  double b = interval.upper / sigma;
  const bool mirrored = a > 0.0;
  if (mirrored) {
    const double t = a;
    a = -b;
    b = -t;
  }
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  const double mass = pb - pa;
  if (!(mass > 0.0))
    throw SamplingError(fmt::format(
        "probability of epsilon in [{}, {}] underflows at sigma = {}", interval.lower,
        interval.upper, sigma));

  Rng rng(seed);
  std::vector<double> draws(n);
  for (auto& out : draws) {
    const double p = pa + rng.uniform() * mass;
    const double z = std::clamp(normal_quantile(p), a, b);
    out = sigma * (mirrored ? -z : z);
  }
  return draws;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("quantile level {} outside [0, 1]", p));
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double net_present_value(double r0, double d, const FeeSchedule& schedule, const ModelConfig& config,
                         int expiry_age) {
  if (expiry_age < 1 || expiry_age > schedule.max_term())
    throw DomainError(fmt::format("expiry age {} outside [1, {}]", expiry_age, schedule.max_term()));
  if (!(config.discount_rate > -1.0))
    throw DomainError(fmt::format("discount rate {} must exceed -1", config.discount_rate));
  double v = 0.0;
  for (int t = 1; t <= expiry_age; ++t) {
    const double discount = std::pow(1.0 + config.discount_rate, -t);
    const double ret = return_at_age(r0, d, t);
    const double cost = schedule.cost_at(t);
    v += config.discount_costs_only ? ret - cost * discount : (ret - cost) * discount;
  }
  return v;
}

ValueEstimate simulate_initial_return(const ModelParams& params, const PatentRecord& record,
                                      const FeeSchedule& schedule, const ModelConfig& config,
                                      std::size_t draws, std::uint64_t seed) {
  const EpsilonInterval interval =
      epsilon_bounds(params, record.covariates, record.expiry_age, schedule, config);
  const double mu = linear_index(params.beta, record.covariates, config.transform);
  const std::vector<double> eps = sample_truncated_normal(params.sigma, interval, draws, seed);

  std::vector<double> log_r0(eps.size());
  std::vector<double> r0(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    log_r0[i] = mu + eps[i];
    r0[i] = std::exp(log_r0[i]);
  }

  ValueEstimate est;
  est.patent_id = record.patent_id;
  est.expiry_age = record.expiry_age;
  est.draws_used = draws;
  est.mc_reliable = draws >= kMinReliableDraws;
  est.log_r0_mean = mean_of(log_r0);
  est.r0_mean = mean_of(r0);
  est.r0_mean_se = draws >= 2 ? sd_of(r0, est.r0_mean) / std::sqrt(static_cast<double>(draws)) : 0.0;

  std::sort(r0.begin(), r0.end());
  est.r0_median = quantile_sorted(r0, 0.5);
  for (double p : kReportedQuantiles) est.r0_quantiles.emplace_back(p, quantile_sorted(r0, p));

  // V is affine and increasing in r0, so mean and median map through it.
  est.npv_mean = net_present_value(est.r0_mean, params.d, schedule, config, record.expiry_age);
  est.npv_median = net_present_value(est.r0_median, params.d, schedule, config, record.expiry_age);
  est.npv_mean_se = return_annuity(params.d, config, record.expiry_age) * est.r0_mean_se;
  return est;
}

EnsembleSummary ensemble_value(std::span<const ModelParams> elite, const PatentRecord& record,
                               const FeeSchedule& schedule, const ModelConfig& config,
                               std::size_t draws, std::uint64_t seed, EnsembleAggregate aggregate) {
  if (elite.empty()) throw DomainError("ensemble valuation needs a non-empty elite set");
  EnsembleSummary out;
  std::vector<double> realizations;
  realizations.reserve(elite.size());
  for (std::size_t k = 0; k < elite.size(); ++k) {
    try {
      const EpsilonInterval interval =
          epsilon_bounds(elite[k], record.covariates, record.expiry_age, schedule, config);
      const std::vector<double> eps =
          sample_truncated_normal(elite[k].sigma, interval, draws, derive_seed(seed, {k}));
      realizations.push_back(linear_index(elite[k].beta, record.covariates, config.transform) +
                             mean_of(eps));
    } catch (const ModelValidityError&) {
      ++out.skipped;
    } catch (const SamplingError&) {
      ++out.skipped;
    }
  }
  if (static_cast<double>(out.skipped) > 0.1 * static_cast<double>(elite.size()))
    throw EnsembleError(fmt::format("patent {}: {} of {} elite parameter vectors gave no valid truncation",
                                    record.patent_id, out.skipped, elite.size()));
  out.realizations = realizations.size();
  std::vector<double> sorted = realizations;
  std::sort(sorted.begin(), sorted.end());
  out.log_r0 = aggregate == EnsembleAggregate::mean ? mean_of(realizations) : quantile_sorted(sorted, 0.5);
  out.band_lower = quantile_sorted(sorted, 0.05);
  out.band_upper = quantile_sorted(sorted, 0.95);
  return out;
}

std::vector<ValueEstimate> simulate_values(const ModelParams& params,
                                           std::span<const PatentRecord> records,
                                           const FeeSchedule& schedule, const ModelConfig& config,
                                           const ValueRunOptions& options) {
  std::vector<ValueEstimate> out(records.size());
  parallel_for(records.size(), options.threads, [&](std::size_t i) {
    const PatentRecord& rec = records[i];
    const std::uint64_t key = hash_label(rec.patent_id);
    out[i] = simulate_initial_return(params, rec, schedule, config, options.draws,
                                     derive_seed(options.seed, {key, 0}));
    if (!options.elite.empty())
      out[i].ensemble = ensemble_value(options.elite, rec, schedule, config, options.ensemble_draws,
                                       derive_seed(options.seed, {key, 1}), options.aggregate);
  });
  return out;
}

}  // namespace patent_rent
