#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patent_rent/fee_schedule.hpp"
#include "patent_rent/patent_record.hpp"
#include "patent_rent/renewal_model.hpp"

namespace patent_rent {

/// Required header columns of the records file, in canonical order.
inline constexpr std::array<std::string_view, 10> kRecordColumns = {
    "patent_id",     "application_year", "expiry_age", "family_size", "inventor_count",
    "grant_lag_years", "tech_scope",     "tech_field", "ownership",   "censored"};

struct RowRejection {
  std::size_t row = 0;  ///< 1-based data row (header excluded)
  std::string reason;
};

/// accepted + rejected.size() always equals the number of data rows.
/// Censored rows are dropped: they appear in `rejected` and raise a warning.
struct IngestReport {
  std::size_t accepted = 0;
  std::vector<RowRejection> rejected;
  std::vector<std::string> warnings;
};

struct ParsedRecords {
  std::vector<PatentRecord> records;
  IngestReport report;
};

/// Maps IPC 4-character prefixes (e.g. "C07D") to technology fields, for
/// inputs that carry raw IPC codes in the tech_field column.
class IpcPrefixMap {
 public:
  IpcPrefixMap() = default;
  void add(std::string prefix, TechField field);
  std::optional<TechField> lookup(std::string_view ipc_code) const;
  bool empty() const noexcept { return map_.empty(); }

  /// Lines of the form `C07D = chemical`; '#' starts a comment.
  static IpcPrefixMap parse(std::string_view text);

 private:
  std::map<std::string, TechField, std::less<>> map_;
};

/// Parses the records CSV. A missing required column throws ValidationError;
/// bad rows are rejected individually and never abort the file.
ParsedRecords parse_records(std::string_view tabular_text, const IpcPrefixMap* prefix_map = nullptr);

/// Writes records in the canonical column order; parse_records reads it back unchanged.
std::string serialize_records(std::span<const PatentRecord> records);

/// A nonnegative count covariate drawn as min + K, K with the given mean
/// (and standard deviation for the negative binomial), optionally capped.
struct CountDistribution {
  enum class Kind { constant, poisson, negative_binomial };
  Kind kind = Kind::poisson;
  double mean = 0.0;  ///< mean of the covariate, min included
  double sd = 0.0;    ///< used by negative_binomial only
  double min = 0.0;
  std::optional<double> max;

  friend bool operator==(const CountDistribution&, const CountDistribution&) = default;
};

/// Sampling recipe for synthetic cohorts.
struct CovariateSpec {
  CountDistribution family_size;
  CountDistribution inventor_size;
  CountDistribution grant_lag;
  CountDistribution tech_scope;
  /// Relative frequency per field in `kAllTechFields` order.
  std::array<double, kTechFieldCount> field_weights{};
  double foreign_share = 0.0;
  int first_application_year = 1999;
  int last_application_year = 2002;

  /// Pooled sample means of the observed Indian cohort: family ~3,
  /// inventors ~2.45, grant lag ~7.25, scope ~1.06; fields weighted by their
  /// patent counts (237 chemical, 100 mechanical, 31 instruments, 170
  /// electrical, 17 others) and about a third foreign subsidiaries.
  static CovariateSpec indian_cohort_defaults();

  /// Throws ConfigurationError on negative weights, inconsistent ranges or
  /// means below the minimum.
  void validate() const;

  friend bool operator==(const CovariateSpec&, const CovariateSpec&) = default;
};

/// Draws a cohort from known parameters: covariates from `spec`, epsilon from
/// N(0, sigma^2), T from the cutpoint ladder. Deterministic in `seed`.
std::vector<PatentRecord> generate_synthetic(const ModelParams& true_params, std::size_t n,
                                             const FeeSchedule& schedule, const ModelConfig& config,
                                             const CovariateSpec& spec, std::uint64_t seed);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  ///< sample standard deviation (n - 1); 0 for a single value
  double min = 0.0;
  double max = 0.0;
};

SummaryStats summarize(std::span<const double> values);

inline constexpr std::array<std::string_view, 5> kDescriptiveVariables = {
    "tech_scope", "inventor_size", "family_size", "renewal_years", "grant_lag"};

struct DescriptiveStats {
  struct Group {
    std::string label;
    std::size_t observations = 0;
    /// Indexed like kDescriptiveVariables.
    std::array<SummaryStats, 5> variables{};
  };
  std::vector<Group> by_field;  ///< non-empty fields in kAllTechFields order
  Group overall;
  double mean_renewal_age = 0.0;
  /// Pearson correlations of tech_scope, inventor_size, family_size, grant_lag.
  std::array<std::array<double, 4>, 4> correlations{};
};

/// Throws DomainError on an empty record list.
DescriptiveStats descriptive_stats(std::span<const PatentRecord> records);

/// Long-format CSV: group,variable,count,mean,sd,min,max followed by the
/// correlation matrix.
std::string descriptive_stats_csv(const DescriptiveStats& stats);

}  // namespace patent_rent
