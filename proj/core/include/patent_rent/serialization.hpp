#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "patent_rent/data_io.hpp"
#include "patent_rent/fee_schedule.hpp"
#include "patent_rent/ga_estimator.hpp"
#include "patent_rent/renewal_model.hpp"

namespace patent_rent {

// JSON documents for parameters, configurations and estimation results.
// Readers throw ValidationError naming the offending key; absent optional
// keys keep their defaults.

nlohmann::json to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GaConfig& config);
GaConfig ga_config_from_json(const nlohmann::json& j);

/// {"sigma": [lo, hi], "d": [lo, hi], "intercept": [lo, hi], ...}; names not
/// given keep ParamBounds::defaults().
nlohmann::json to_json(const ParamBounds& bounds);
ParamBounds bounds_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CovariateSpec& spec);
CovariateSpec covariate_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeeSchedule& schedule);

/// Everything needed to re-create an estimation run alongside its output.
struct EstimationDocument {
  EstimationResult result;
  GaConfig ga;
  ParamBounds bounds;
  ModelConfig model;
  std::string schedule_name;
  std::size_t records = 0;
};

nlohmann::json to_json(const EstimationDocument& doc);
EstimationDocument estimation_from_json(const nlohmann::json& j);

/// Parses JSON text, turning syntax errors into ValidationError tagged with `context`.
nlohmann::json parse_json(std::string_view text, std::string_view context);

/// Stable rendering: two-space indent, trailing newline, shortest round-trip doubles.
std::string dump(const nlohmann::json& j);

}  // namespace patent_rent
