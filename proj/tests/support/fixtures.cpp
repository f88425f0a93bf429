#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixtures {

using patent_rent::Coef;
using patent_rent::ModelParams;

ModelParams recovery_params() {
  ModelParams p;
  p.sigma = 1.5;
  p.d = 0.30;
  p[Coef::intercept] = 6.0;
  p[Coef::chemical] = -0.5;
  p[Coef::mechanical] = 0.4;
  p[Coef::electrical] = 0.6;
  p[Coef::instruments] = -0.1;
  p[Coef::family_size] = 0.10;
  p[Coef::inventor_size] = 0.08;
  p[Coef::grant_lag] = -0.20;
  p[Coef::tech_scope] = 0.30;
  return p;
}

ModelParams reference_params() {
  ModelParams p;
  p.sigma = 6.07;
  p.d = 0.49;
  p[Coef::intercept] = 0.0;
  p[Coef::chemical] = -2.04;
  p[Coef::mechanical] = 1.81;
  p[Coef::electrical] = 2.45;
  p[Coef::instruments] = -0.40;
  p[Coef::family_size] = 0.37;
  p[Coef::inventor_size] = 0.21;
  p[Coef::grant_lag] = -1.47;
  p[Coef::tech_scope] = 0.78;
  return p;
}

ModelParams random_params(patent_rent::Rng& rng) {
  ModelParams p;
  p.sigma = rng.uniform(0.3, 7.0);
  p.d = rng.uniform(0.05, 0.6);
  for (auto& b : p.beta) b = rng.uniform(-2.0, 2.0);
  p[Coef::intercept] = rng.uniform(2.0, 9.0);
  return p;
}

patent_rent::CovariateVector random_covariates(patent_rent::Rng& rng) {
  patent_rent::CovariateVector x;
  x.family_size = static_cast<double>(rng.index(15));
  x.inventor_size = 1.0 + static_cast<double>(rng.index(6));
  x.grant_lag = 2.0 + static_cast<double>(rng.index(10));
  x.tech_scope = 1.0 + static_cast<double>(rng.index(3));
  x.tech_field = patent_rent::kAllTechFields[rng.index(patent_rent::kTechFieldCount)];
  x.ownership = rng.bernoulli(0.34) ? patent_rent::Ownership::foreign_subsidiary : patent_rent::Ownership::domestic;
  return x;
}

std::filesystem::path data_dir() { return PATENT_RENT_TEST_DATA_DIR; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("patent_rent_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
