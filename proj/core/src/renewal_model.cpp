#include "patent_rent/renewal_model.hpp"

#include <cmath>
#include <fmt/format.h>

#include "patent_rent/errors.hpp"

namespace patent_rent {

namespace {
constexpr std::array<std::string_view, kCoefCount> kCoefNames = {
    "intercept",   "chemical",    "mechanical",    "electrical", "instruments",
    "family_size", "inventor_size", "grant_lag", "tech_scope"};
}

std::string_view to_string(TechField field) noexcept {
  switch (field) {
    case TechField::chemical: return "chemical";
    case TechField::mechanical: return "mechanical";
    case TechField::electrical: return "electrical";
    case TechField::instruments: return "instruments";
    case TechField::others: return "others";
  }
  return "others";
}

std::string_view to_string(Ownership ownership) noexcept {
  return ownership == Ownership::domestic ? "domestic" : "foreign_subsidiary";
}

std::optional<TechField> parse_tech_field(std::string_view label) noexcept {
  for (TechField f : kAllTechFields) {
    if (label == to_string(f)) return f;
  }
  return std::nullopt;
}

std::optional<Ownership> parse_ownership(std::string_view label) noexcept {
  if (label == "domestic") return Ownership::domestic;
  if (label == "foreign_subsidiary") return Ownership::foreign_subsidiary;
  return std::nullopt;
}

void CovariateVector::validate() const {
  const auto check = [](double v, double min, std::string_view what) {
    if (!std::isfinite(v) || v < min)
      throw DomainError(fmt::format("{} = {} must be finite and >= {}", what, v, min));
  };
  check(family_size, 0.0, "family_size");
  check(inventor_size, 1.0, "inventor_size");
  check(grant_lag, 0.0, "grant_lag");
  check(tech_scope, 1.0, "tech_scope");
}

std::string_view coef_name(std::size_t index) noexcept {
  return index < kCoefCount ? kCoefNames[index] : std::string_view{};
}

std::optional<std::size_t> coef_index(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kCoefCount; ++i) {
    if (kCoefNames[i] == name) return i;
  }
  return std::nullopt;
}

void ModelParams::validate() const {
  if (!(std::isfinite(sigma) && sigma > 0.0))
    throw DomainError(fmt::format("sigma = {} must be finite and > 0", sigma));
  if (!(std::isfinite(d) && d > 0.0))
    throw DomainError(fmt::format("d = {} must be finite and > 0", d));
  for (std::size_t i = 0; i < kCoefCount; ++i) {
    if (!std::isfinite(beta[i]))
      throw DomainError(fmt::format("coefficient {} is not finite", coef_name(i)));
  }
}

bool CovariateTransform::is_identity() const noexcept {
  return *this == CovariateTransform{};
}

void ModelConfig::validate() const {
  if (!(discount_rate > 0.0 && discount_rate < 1.0))
    throw ConfigurationError(fmt::format("discount rate {} must lie in (0, 1)", discount_rate));
  if (min_age < 1 || min_age >= max_term)
    throw ConfigurationError(
        fmt::format("min_age {} must be >= 1 and below max_term {}", min_age, max_term));
  for (std::size_t k = 0; k < 4; ++k) {
    if (!std::isfinite(transform.scale[k]) || !std::isfinite(transform.shift[k]))
      throw ConfigurationError("covariate transform must be finite");
  }
}

double z_factor(double d, double s, double t) {
  if (!(d > 0.0) || !(s > 0.0))
    throw DomainError(fmt::format("z_factor needs d > 0 and s > 0 (got d={}, s={})", d, s));
  if (!(t >= 0.0)) throw DomainError(fmt::format("z_factor needs t >= 0 (got {})", t));
  const double k = d + s;
  return std::exp(-d * t) * (-std::expm1(-k) / k);
}

double threshold(const FeeSchedule& schedule, double d, const ModelConfig& config, int t) {
  const double cost = schedule.cost_at(t);
  if (!(cost > 0.0))
    throw ConfigurationError(fmt::format(
        "schedule '{}' charges nothing at age {}; the renewal threshold is undefined", schedule.name(), t));
  return std::log(cost / z_factor(d, config.discount_rate, t));
}

Coefficients design_row(const CovariateVector& x, const CovariateTransform& tr) noexcept {
  Coefficients row{};
  row[static_cast<std::size_t>(Coef::intercept)] = 1.0;
  switch (x.tech_field) {
    case TechField::chemical: row[static_cast<std::size_t>(Coef::chemical)] = 1.0; break;
    case TechField::mechanical: row[static_cast<std::size_t>(Coef::mechanical)] = 1.0; break;
    case TechField::electrical: row[static_cast<std::size_t>(Coef::electrical)] = 1.0; break;
    case TechField::instruments: row[static_cast<std::size_t>(Coef::instruments)] = 1.0; break;
    case TechField::others: break;
  }
  row[static_cast<std::size_t>(Coef::family_size)] = tr.scale[0] * x.family_size + tr.shift[0];
  row[static_cast<std::size_t>(Coef::inventor_size)] = tr.scale[1] * x.inventor_size + tr.shift[1];
  row[static_cast<std::size_t>(Coef::grant_lag)] = tr.scale[2] * x.grant_lag + tr.shift[2];
  row[static_cast<std::size_t>(Coef::tech_scope)] = tr.scale[3] * x.tech_scope + tr.shift[3];
  return row;
}

double linear_index(const Coefficients& beta, const CovariateVector& x,
                    const CovariateTransform& transform) noexcept {
  const Coefficients row = design_row(x, transform);
  double acc = 0.0;
  for (std::size_t i = 0; i < kCoefCount; ++i) acc += beta[i] * row[i];
  return acc;
}

double linear_index(const Coefficients& beta, const CovariateVector& x) noexcept {
  return linear_index(beta, x, CovariateTransform{});
}

double return_at_age(double r0, double d, double t) noexcept { return r0 * std::exp(-d * t); }

}  // namespace patent_rent
