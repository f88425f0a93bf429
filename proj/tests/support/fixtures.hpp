#pragma once

#include <filesystem>
#include <string>

#include "patent_rent/random.hpp"
#include "patent_rent/renewal_model.hpp"

namespace fixtures {

/// Recovery fixture: sigma 1.5, d 0.30, intercept 6 and moderate effects.
patent_rent::ModelParams recovery_params();

/// Reference estimates for the Indian cohort with intercept 0: sigma 6.07, d 0.49.
patent_rent::ModelParams reference_params();

/// Parameters and covariates drawn from broad ranges, for property tests.
patent_rent::ModelParams random_params(patent_rent::Rng& rng);
patent_rent::CovariateVector random_covariates(patent_rent::Rng& rng);

std::filesystem::path data_dir();
std::string read_text(const std::filesystem::path& path);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace fixtures
