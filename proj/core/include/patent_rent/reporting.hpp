#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patent_rent/patent_record.hpp"
#include "patent_rent/value_simulator.hpp"

namespace patent_rent {

/// Expiry-age buckets of the expiration table: never renewed (T = 2), 3-6,
/// 7-10, 11-15, 16-20.
inline constexpr std::array<std::string_view, 5> kExpiryBucketLabels = {
    "Never Renewed", "3rd to 6th year", "7th to 10th year", "11th to 15th year", "16th to 20th year"};

/// Bucket index of an expiry age, or -1 outside 2..20.
int expiry_bucket(int expiry_age) noexcept;

/// Display label of a field in the report tables ("Chemical", ...).
std::string_view field_display_label(TechField field) noexcept;
std::string_view ownership_display_label(Ownership ownership) noexcept;

struct ExpiryShareRow {
  std::string label;
  std::array<double, 5> percent{};  ///< sums to 100
  std::size_t total = 0;
};

/// One row per technology field present, then an "Average" row pooling all
/// patents.
struct ExpiryShareTable {
  std::vector<ExpiryShareRow> rows;
};

ExpiryShareTable expiry_share_table(std::span<const PatentRecord> records);

enum class GroupKey { technology, ownership };
enum class MoneyField { r0, npv };

struct GroupRow {
  std::string label;
  std::size_t count = 0;
  double patent_share = 0.0;  ///< percent of patents
  double value_share = 0.0;   ///< percent of summed per-patent mean values
  double mean = 0.0;
  double median = 0.0;
};

struct GroupedValueTable {
  GroupKey key = GroupKey::technology;
  MoneyField field = MoneyField::r0;
  double deflator = 1.0;
  std::vector<GroupRow> rows;
};

/// Shares, means and medians of per-patent mean values by group. Every money
/// cell is multiplied by `deflator`. Throws ReportingError naming the first
/// record without an estimate.
GroupedValueTable value_by_group(std::span<const PatentRecord> records,
                                 std::span<const ValueEstimate> estimates, GroupKey key,
                                 MoneyField field, double deflator = 1.0);

inline constexpr std::array<double, 6> kValueQuantileLevels = {0.25, 0.50, 0.75, 0.90, 0.95, 0.99};

struct QuantileColumn {
  std::string label;
  std::vector<double> quantiles;  ///< one per level, nondecreasing
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

/// Distribution of per-patent mean NPV by technology field. Fields without
/// patents are left out.
struct QuantileTable {
  std::vector<double> levels;
  std::vector<QuantileColumn> columns;
};

QuantileTable quantile_table(std::span<const PatentRecord> records,
                             std::span<const ValueEstimate> estimates,
                             std::span<const double> levels = kValueQuantileLevels,
                             double deflator = 1.0);

/// Mean simulated log r(0) per expiry age, for plotting value against age.
struct AgeTrendPoint {
  int expiry_age = 0;
  std::size_t patents = 0;
  double mean_log_r0 = 0.0;
};
std::vector<AgeTrendPoint> age_trend(std::span<const PatentRecord> records,
                                     std::span<const ValueEstimate> estimates);

// Machine-readable renderings keep full precision.
std::string to_csv(const ExpiryShareTable& table);
std::string to_csv(const GroupedValueTable& table);
std::string to_csv(const QuantileTable& table);
std::string to_csv(std::span<const AgeTrendPoint> trend);

/// Money display scaling for the aligned renderings: values are divided by
/// `unit_divisor` and shown with three decimals.
struct TextStyle {
  double unit_divisor = 1e6;
  std::string unit_label = "$M";
};

// Aligned plain-text renderings in the conventional row/column layout.
std::string render_text(const ExpiryShareTable& table);
/// Technology block, blank line, ownership block.
std::string render_text(const GroupedValueTable& by_technology, const GroupedValueTable& by_ownership,
                        const TextStyle& style = {});
std::string render_text(const QuantileTable& table, const TextStyle& style = {});

/// Per-patent value table (one row per estimate, all fields).
std::string value_table_csv(std::span<const ValueEstimate> estimates);
/// Reads value_table_csv output back; quantile columns are recovered from the header.
std::vector<ValueEstimate> parse_value_table(std::string_view csv);

}  // namespace patent_rent
