#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patent_rent {

/// Annual renewal cost charged for every age in [age_from, age_to].
struct FeeEntry {
  int age_from = 0;
  int age_to = 0;
  double annual_cost = 0.0;

  friend bool operator==(const FeeEntry&, const FeeEntry&) = default;
};

/// Age-indexed renewal cost schedule c_t. Immutable once constructed.
///
/// Entries are disjoint, ascending and inside [1, max_term]; ages that no
/// entry covers cost nothing. Currency is a label only, no conversion happens
/// anywhere in the library.
class FeeSchedule {
 public:
  /// Throws ValidationError listing every violated invariant.
  FeeSchedule(std::string name, std::string currency, std::vector<FeeEntry> entries,
              int max_term = 20);

  const std::string& name() const noexcept { return name_; }
  const std::string& currency() const noexcept { return currency_; }
  const std::vector<FeeEntry>& entries() const noexcept { return entries_; }
  int max_term() const noexcept { return max_term_; }

  /// Cost due at `age`; 0 where uncovered. Throws DomainError outside [1, max_term].
  double cost_at(int age) const;

  /// First age with a strictly positive cost, if any.
  std::optional<int> first_fee_age() const noexcept;

  /// True when cost_at never decreases across ages that carry an entry.
  bool is_nondecreasing() const noexcept;

  friend bool operator==(const FeeSchedule&, const FeeSchedule&) = default;

 private:
  std::string name_;
  std::string currency_;
  std::vector<FeeEntry> entries_;
  int max_term_ = 20;
};

/// Built-in schedules: "india", "china", "us".
FeeSchedule builtin_schedule(std::string_view country);
std::vector<std::string> builtin_schedule_names();
bool is_builtin_schedule(std::string_view name) noexcept;

/// Parses the key-value schedule document:
///
///     # comment
///     name = india
///     currency = USD
///     max_term = 20
///     entry = {3, 6, 54.81}
///
/// Throws ValidationError listing every problem found (syntax and invariants).
FeeSchedule load_schedule(std::string_view config_text);

/// Inverse of load_schedule; costs are written in shortest round-trip form.
std::string serialize_schedule(const FeeSchedule& schedule);

}  // namespace patent_rent
