#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patent_rent/fee_schedule.hpp"
#include "patent_rent/patent_record.hpp"
#include "patent_rent/renewal_model.hpp"

namespace patent_rent {

/// Range of the index error consistent with an observed expiry age.
/// Either end may be infinite, never both.
struct EpsilonInterval {
  double lower;
  double upper;
};

/// Bounds on epsilon = log r(0) - beta.X implied by expiry at age T.
/// Throws ModelValidityError when the cutpoints invert (lower > upper).
EpsilonInterval epsilon_bounds(const ModelParams& params, const CovariateVector& x, int expiry_age,
                               const FeeSchedule& schedule, const ModelConfig& config);

/// n independent draws of N(0, sigma^2) restricted to `interval`, by inverse
/// CDF on the mapped uniform range. Intervals on the upper side are mirrored
/// to the lower tail, where Phi keeps full relative precision. Every draw lies
/// inside the interval. Throws SamplingError when the interval mass underflows.
std::vector<double> sample_truncated_normal(double sigma, EpsilonInterval interval, std::size_t n,
                                            std::uint64_t seed);

/// Summary of the parameter-ensemble realizations for one patent.
struct EnsembleSummary {
  double log_r0 = 0.0;     ///< mean (or median) over Omega_k of the per-k mean log r(0)
  double band_lower = 0.0; ///< 5% empirical quantile over realizations
  double band_upper = 0.0; ///< 95% empirical quantile over realizations
  std::size_t realizations = 0;
  std::size_t skipped = 0;
};

struct ValueEstimate {
  std::string patent_id;
  int expiry_age = 0;
  std::size_t draws_used = 0;
  double log_r0_mean = 0.0;
  double r0_mean = 0.0;
  double r0_mean_se = 0.0;  ///< Monte Carlo standard error of r0_mean
  double r0_median = 0.0;
  /// (probability, value) pairs, probabilities ascending and at most 0.99.
  std::vector<std::pair<double, double>> r0_quantiles;
  double npv_mean = 0.0;
  double npv_mean_se = 0.0;
  double npv_median = 0.0;
  /// False when too few draws back the MC standard errors.
  bool mc_reliable = true;
  std::optional<EnsembleSummary> ensemble;
};

/// Draw counts below this make the MC standard error unreliable.
inline constexpr std::size_t kMinReliableDraws = 100;

/// Quantile levels reported for r(0).
inline constexpr double kReportedQuantiles[] = {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};

/// Monte Carlo estimate of r(0) = exp(beta.X + epsilon) given the observed
/// expiry age, plus the NPV of the realized life at the mean and median.
ValueEstimate simulate_initial_return(const ModelParams& params, const PatentRecord& record,
                                      const FeeSchedule& schedule, const ModelConfig& config,
                                      std::size_t draws, std::uint64_t seed);

/// V(T) = sum_{t=1}^{T} (r0 e^{-dt} - c_t) (1+s)^{-t}; with
/// config.discount_costs_only the return term is left undiscounted.
/// Accepts 1 <= T <= schedule max_term and s > -1.
double net_present_value(double r0, double d, const FeeSchedule& schedule, const ModelConfig& config,
                         int expiry_age);

enum class EnsembleAggregate { mean, median };

/// Repeats the per-patent log r(0) estimate under every elite parameter
/// vector. Vectors giving an invalid truncation are skipped; more than 10%
/// skipped throws EnsembleError.
EnsembleSummary ensemble_value(std::span<const ModelParams> elite, const PatentRecord& record,
                               const FeeSchedule& schedule, const ModelConfig& config,
                               std::size_t draws, std::uint64_t seed,
                               EnsembleAggregate aggregate = EnsembleAggregate::mean);

struct ValueRunOptions {
  std::size_t draws = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// When non-empty, each estimate also carries an EnsembleSummary.
  std::vector<ModelParams> elite;
  std::size_t ensemble_draws = 1000;
  EnsembleAggregate aggregate = EnsembleAggregate::mean;
};

/// Values every record; per-patent streams are keyed by patent id so results
/// do not depend on record order or the number of threads.
std::vector<ValueEstimate> simulate_values(const ModelParams& params,
                                           std::span<const PatentRecord> records,
                                           const FeeSchedule& schedule, const ModelConfig& config,
                                           const ValueRunOptions& options);

/// Inclusive linear interpolation between order statistics (R type 7) on a
/// sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace patent_rent
