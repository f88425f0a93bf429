#pragma once

#include <string>

#include "patent_rent/renewal_model.hpp"

namespace patent_rent {

/// One observed, expired patent: its expiry age T and characteristics X.
/// T = 2 codes "never renewed", T = 20 codes "kept to full term".
struct PatentRecord {
  std::string patent_id;
  int application_year = 0;
  int expiry_age = 2;
  CovariateVector covariates{};
  /// Labels exactly as they appeared in the source file.
  std::string raw_tech_field;
  std::string raw_ownership;

  friend bool operator==(const PatentRecord&, const PatentRecord&) = default;
};

}  // namespace patent_rent
