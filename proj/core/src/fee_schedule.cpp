#include "patent_rent/fee_schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>

#include "patent_rent/errors.hpp"
#include "text_util.hpp"

namespace patent_rent {

namespace {

std::vector<std::string> check_schedule(const std::string& name, const std::string& currency,
                                        const std::vector<FeeEntry>& entries, int max_term) {
  std::vector<std::string> v;
  if (name.empty()) v.emplace_back("name must not be empty");
  const bool iso = currency.size() == 3 &&
                   std::all_of(currency.begin(), currency.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
  if (!iso) v.push_back(fmt::format("currency '{}' is not a three-letter ISO-4217 code", currency));
  if (max_term < 1) v.push_back(fmt::format("max_term {} must be at least 1", max_term));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.age_from > e.age_to)
      v.push_back(fmt::format("entry {}: range {}-{} is descending", i + 1, e.age_from, e.age_to));
    if (e.age_from < 1 || e.age_to > max_term)
      v.push_back(fmt::format("entry {}: range {}-{} lies outside [1, {}]", i + 1, e.age_from,
                              e.age_to, max_term));
    if (!std::isfinite(e.annual_cost))
      v.push_back(fmt::format("entry {}: cost is not finite", i + 1));
    else if (e.annual_cost < 0.0)
      v.push_back(fmt::format("entry {}: negative cost {}", i + 1, e.annual_cost));
    if (i > 0) {
      const auto& prev = entries[i - 1];
      if (e.age_from <= prev.age_to) {
        if (e.age_to >= prev.age_from && e.age_from >= prev.age_from)
          v.push_back(fmt::format("entry {}: range {}-{} overlaps {}-{}", i + 1, e.age_from,
                                  e.age_to, prev.age_from, prev.age_to));
        else
          v.push_back(fmt::format("entry {}: range {}-{} is not sorted after {}-{}", i + 1,
                                  e.age_from, e.age_to, prev.age_from, prev.age_to));
      }
    }
  }
  return v;
}

}  // namespace

FeeSchedule::FeeSchedule(std::string name, std::string currency, std::vector<FeeEntry> entries,
                         int max_term)
    : name_(std::move(name)),
      currency_(std::move(currency)),
      entries_(std::move(entries)),
      max_term_(max_term) {
  auto violations = check_schedule(name_, currency_, entries_, max_term_);
  if (!violations.empty())
    throw ValidationError(fmt::format("invalid fee schedule '{}'", name_), std::move(violations));
}

double FeeSchedule::cost_at(int age) const {
  if (age < 1 || age > max_term_)
    throw DomainError(fmt::format("age {} outside [1, {}] for schedule '{}'", age, max_term_, name_));
  for (const auto& e : entries_) {
    if (age >= e.age_from && age <= e.age_to) return e.annual_cost;
  }
  return 0.0;
}

std::optional<int> FeeSchedule::first_fee_age() const noexcept {
  for (const auto& e : entries_) {
    if (e.annual_cost > 0.0) return e.age_from;
  }
  return std::nullopt;
}

bool FeeSchedule::is_nondecreasing() const noexcept {
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].annual_cost < entries_[i - 1].annual_cost) return false;
  }
  return true;
}

FeeSchedule builtin_schedule(std::string_view country) {
  const std::string key = detail::to_lower(detail::trim(country));
  if (key == "india")
    return FeeSchedule("india", "USD",
                       {{3, 6, 54.81}, {7, 10, 164.43}, {11, 15, 328.86}, {16, 20, 548.10}});
  if (key == "china")
    return FeeSchedule("china", "USD",
                       {{1, 3, 135.0}, {4, 6, 180.0}, {7, 9, 300.0}, {10, 12, 600.0},
                        {13, 15, 900.0}, {16, 20, 1200.0}});
  if (key == "us")
    return FeeSchedule("us", "USD", {{4, 7, 1600.0}, {8, 11, 3600.0}, {12, 14, 7400.0}});
  throw DomainError(fmt::format("unknown built-in schedule '{}' (expected india, china or us)", country));
}

std::vector<std::string> builtin_schedule_names() { return {"india", "china", "us"}; }

bool is_builtin_schedule(std::string_view name) noexcept {
  return name == "india" || name == "china" || name == "us";
}

FeeSchedule load_schedule(std::string_view config_text) {
  std::vector<std::string> problems;
  std::optional<std::string> name, currency;
  std::optional<int> max_term;
  std::vector<FeeEntry> entries;

  std::size_t line_no = 0;
  for (std::string_view raw : detail::split_lines(config_text)) {
    ++line_no;
    std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(fmt::format("line {}: expected 'key = value'", line_no));
      continue;
    }
    const std::string key = detail::to_lower(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key == "name") {
      name = std::string(value);
    } else if (key == "currency") {
      currency = std::string(value);
    } else if (key == "max_term") {
      int v = 0;
      if (!detail::parse_int(value, v))
        problems.push_back(fmt::format("line {}: max_term '{}' is not an integer", line_no, value));
      else
        max_term = v;
    } else if (key == "entry") {
      if (value.size() < 2 || value.front() != '{' || value.back() != '}') {
        problems.push_back(fmt::format("line {}: entry must look like {{from, to, cost}}", line_no));
        continue;
      }
      const auto fields = detail::split(value.substr(1, value.size() - 2), ',');
      FeeEntry e;
      if (fields.size() != 3 || !detail::parse_int(detail::trim(fields[0]), e.age_from) ||
          !detail::parse_int(detail::trim(fields[1]), e.age_to) ||
          !detail::parse_double(detail::trim(fields[2]), e.annual_cost)) {
        problems.push_back(fmt::format("line {}: entry must look like {{from, to, cost}}", line_no));
        continue;
      }
      entries.push_back(e);
    } else {
      problems.push_back(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }
  if (!name) problems.emplace_back("missing 'name'");
  if (!currency) problems.emplace_back("missing 'currency'");
  if (!max_term) problems.emplace_back("missing 'max_term'");
  if (name && currency && max_term) {
    auto more = check_schedule(*name, *currency, entries, *max_term);
    problems.insert(problems.end(), more.begin(), more.end());
  }
  if (!problems.empty()) throw ValidationError("invalid schedule document", std::move(problems));
  return FeeSchedule(*name, *currency, std::move(entries), *max_term);
}

std::string serialize_schedule(const FeeSchedule& schedule) {
  std::string out;
  out += fmt::format("name = {}\n", schedule.name());
  out += fmt::format("currency = {}\n", schedule.currency());
  out += fmt::format("max_term = {}\n", schedule.max_term());
  for (const auto& e : schedule.entries())
    out += fmt::format("entry = {{{}, {}, {}}}\n", e.age_from, e.age_to, detail::format_double(e.annual_cost));
  return out;
}

}  // namespace patent_rent
