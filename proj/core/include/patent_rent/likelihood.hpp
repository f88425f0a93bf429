#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "patent_rent/fee_schedule.hpp"
#include "patent_rent/patent_record.hpp"
#include "patent_rent/renewal_model.hpp"

namespace patent_rent {

/// Floor applied inside the log so tail underflow never produces -inf.
inline constexpr double kProbabilityFloor = 1e-300;

/// Renewal cutpoints th_t for the decision ages min_age .. max_term-1.
///
/// Ages before the first fee-bearing age carry no decision: they reuse the
/// first fee-bearing threshold, so the corresponding expiry cells get zero
/// mass. With `NeverRenewedRule::first_fee_at_min_age` the min-age cutpoint is
/// instead log(c_first / z_min).
struct ThresholdTable {
  int min_age = 2;
  std::vector<double> values;  ///< values[k] is th at age min_age + k
  bool monotone = true;        ///< false if any cutpoint decreases

  double at(int age) const { return values.at(static_cast<std::size_t>(age - min_age)); }
  int max_age() const noexcept { return min_age + static_cast<int>(values.size()) - 1; }
};

/// Throws ConfigurationError when the schedule charges nothing at a decision
/// age after its first fee (the cutpoint would be undefined) or charges
/// nothing at all.
ThresholdTable build_threshold_table(const FeeSchedule& schedule, double d, const ModelConfig& config);

/// Standardized log-return bounds (lower, upper) of the expiry cell T on the
/// cutpoint ladder; infinite at the two open ends.
struct CellBounds {
  double lower;
  double upper;
};
CellBounds cell_bounds(const ThresholdTable& table, int expiry_age);

/// Probability of each expiry age T = min_age .. max_term.
struct ExpiryPmf {
  int min_age = 2;
  std::vector<double> probabilities;
  /// Set when the cutpoints decrease somewhere; entries may then be negative.
  bool non_monotone_warning = false;

  double at(int expiry_age) const {
    return probabilities.at(static_cast<std::size_t>(expiry_age - min_age));
  }
};

ExpiryPmf expiry_pmf(const ModelParams& params, const CovariateVector& x,
                     const FeeSchedule& schedule, const ModelConfig& config);

struct LogLikelihood {
  double value = 0.0;
  bool non_monotone_warning = false;
};

/// Sum over records of log max(P[T_i = t_i], 1e-300), reduced pairwise in
/// record order. Throws DomainError on an empty record list or a record whose
/// expiry age lies outside [min_age, max_term].
LogLikelihood log_likelihood(const ModelParams& params, std::span<const PatentRecord> records,
                             const FeeSchedule& schedule, const ModelConfig& config);

/// Pairwise (cascade) summation in index order; the result depends only on
/// the values and their order.
double pairwise_sum(std::span<const double> values) noexcept;

/// Repeated log-likelihood evaluation over a fixed record set. Design rows
/// are precomputed and threshold tables are cached per depreciation rate
/// (keyed, and computed, at d rounded to 12 significant digits). Safe to call
/// concurrently from several threads.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(std::span<const PatentRecord> records, const FeeSchedule& schedule,
                      const ModelConfig& config);

  LogLikelihood operator()(const ModelParams& params) const;

  std::size_t size() const noexcept { return ages_.size(); }
  const FeeSchedule& schedule() const noexcept { return schedule_; }
  const ModelConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const ThresholdTable> table_for(double d) const;

  FeeSchedule schedule_;
  ModelConfig config_;
  std::vector<Coefficients> rows_;
  std::vector<int> ages_;

  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const ThresholdTable>> cache_;
};

/// d rounded to 12 significant digits.
double round_significant(double value, int digits) noexcept;

}  // namespace patent_rent
