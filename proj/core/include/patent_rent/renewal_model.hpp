#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "patent_rent/fee_schedule.hpp"

namespace patent_rent {

enum class TechField { chemical, mechanical, electrical, instruments, others };
inline constexpr std::size_t kTechFieldCount = 5;
inline constexpr std::array<TechField, kTechFieldCount> kAllTechFields = {
    TechField::chemical, TechField::mechanical, TechField::instruments, TechField::electrical,
    TechField::others};

enum class Ownership { domestic, foreign_subsidiary };

std::string_view to_string(TechField field) noexcept;
std::string_view to_string(Ownership ownership) noexcept;
std::optional<TechField> parse_tech_field(std::string_view label) noexcept;
std::optional<Ownership> parse_ownership(std::string_view label) noexcept;

/// Patent characteristics entering the initial-return index. Ownership is
/// carried for reporting only and never enters the index.
struct CovariateVector {
  double family_size = 0.0;
  double inventor_size = 1.0;
  double grant_lag = 0.0;
  double tech_scope = 1.0;
  TechField tech_field = TechField::others;
  Ownership ownership = Ownership::domestic;

  /// Throws DomainError when a numeric covariate is non-finite or out of range.
  void validate() const;

  friend bool operator==(const CovariateVector&, const CovariateVector&) = default;
};

/// Named positions of the nine index coefficients. "others" is the reference
/// field and has no coefficient of its own.
enum class Coef : std::size_t {
  intercept,
  chemical,
  mechanical,
  electrical,
  instruments,
  family_size,
  inventor_size,
  grant_lag,
  tech_scope,
};
inline constexpr std::size_t kCoefCount = 9;
using Coefficients = std::array<double, kCoefCount>;

std::string_view coef_name(std::size_t index) noexcept;
std::optional<std::size_t> coef_index(std::string_view name) noexcept;

/// The estimand: error scale, depreciation rate and index coefficients.
struct ModelParams {
  double sigma = 1.0;
  double d = 0.1;
  Coefficients beta{};

  double& operator[](Coef c) noexcept { return beta[static_cast<std::size_t>(c)]; }
  double operator[](Coef c) const noexcept { return beta[static_cast<std::size_t>(c)]; }

  /// Throws DomainError unless sigma > 0, d > 0 and every value is finite.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Which cutpoint stands for the "never renewed" state when the schedule
/// charges nothing at the minimum age (India charges from age 3).
enum class NeverRenewedRule {
  first_fee_age,         ///< threshold at the first fee-bearing age
  first_fee_at_min_age,  ///< first fee discounted with z at the minimum age
};

/// Optional affine map x -> scale * x + shift per numeric covariate, applied
/// before the index. Identity by default.
struct CovariateTransform {
  std::array<double, 4> scale{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> shift{0.0, 0.0, 0.0, 0.0};

  bool is_identity() const noexcept;
  friend bool operator==(const CovariateTransform&, const CovariateTransform&) = default;
};

struct ModelConfig {
  double discount_rate = 0.10;
  int max_term = 20;
  int min_age = 2;
  NeverRenewedRule never_renewed = NeverRenewedRule::first_fee_age;
  /// Discount only the fees in the NPV sum instead of the net flow.
  bool discount_costs_only = false;
  CovariateTransform transform{};

  /// Throws ConfigurationError unless 0 < s < 1 and min_age < max_term.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Present value at age t of the flow r(0) e^{-d tau} over [t, t+1],
/// discounted to t at rate s, per unit r(0):
/// e^{-dt} (1 - e^{-(d+s)}) / (d+s).
double z_factor(double d, double s, double t);

/// Renewal cutpoint log(c_t / z_t). Throws ConfigurationError when the
/// schedule charges nothing at age t.
double threshold(const FeeSchedule& schedule, double d, const ModelConfig& config, int t);

/// beta . X, with the reference field contributing nothing beyond the intercept.
double linear_index(const Coefficients& beta, const CovariateVector& x) noexcept;
double linear_index(const Coefficients& beta, const CovariateVector& x,
                    const CovariateTransform& transform) noexcept;

/// Design row matching `Coefficients` (1, four dummies, four covariates).
Coefficients design_row(const CovariateVector& x, const CovariateTransform& transform) noexcept;

/// r(t) = r(0) e^{-dt}.
double return_at_age(double r0, double d, double t) noexcept;

}  // namespace patent_rent
