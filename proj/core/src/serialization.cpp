#include "patent_rent/serialization.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "patent_rent/errors.hpp"

namespace patent_rent {

using nlohmann::json;

namespace {

// Reads j[key] into out when present; type mismatches become ValidationError.
template <typename T>
void read(const json& j, std::string_view key, T& out, std::string_view context) {
  if (!j.is_object()) throw ValidationError(std::string(context), {"expected a JSON object"});
  const auto it = j.find(std::string(key));
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string(context), {fmt::format("key '{}' has the wrong type", key)});
  }
}

template <typename T>
T require(const json& j, std::string_view key, std::string_view context) {
  if (!j.is_object() || !j.contains(std::string(key)))
    throw ValidationError(std::string(context), {fmt::format("missing key '{}'", key)});
  T out{};
  read(j, key, out, context);
  return out;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view context) {
  std::vector<std::string> bad;
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end())
      bad.push_back(fmt::format("unknown key '{}'", k));
  }
  if (!bad.empty()) throw ValidationError(std::string(context), std::move(bad));
}

std::string_view to_string(NeverRenewedRule rule) {
  return rule == NeverRenewedRule::first_fee_age ? "first_fee_age" : "first_fee_at_min_age";
}

std::string_view to_string(CountDistribution::Kind kind) {
  switch (kind) {
    case CountDistribution::Kind::constant: return "constant";
    case CountDistribution::Kind::poisson: return "poisson";
    case CountDistribution::Kind::negative_binomial: return "negative_binomial";
  }
  return "poisson";
}

json to_json(const CountDistribution& d) {
  json j{{"kind", to_string(d.kind)}, {"mean", d.mean}, {"min", d.min}};
  if (d.kind == CountDistribution::Kind::negative_binomial) j["sd"] = d.sd;
  if (d.max) j["max"] = *d.max;
  return j;
}

CountDistribution count_from_json(const json& j, CountDistribution out, std::string_view context) {
  reject_unknown(j, {"kind", "mean", "sd", "min", "max"}, context);
  std::string kind(to_string(out.kind));
  read(j, "kind", kind, context);
  if (kind == "constant")
    out.kind = CountDistribution::Kind::constant;
  else if (kind == "poisson")
    out.kind = CountDistribution::Kind::poisson;
  else if (kind == "negative_binomial")
    out.kind = CountDistribution::Kind::negative_binomial;
  else
    throw ValidationError(std::string(context), {fmt::format("unknown distribution kind '{}'", kind)});
  read(j, "mean", out.mean, context);
  read(j, "sd", out.sd, context);
  read(j, "min", out.min, context);
  if (j.contains("max")) out.max = require<double>(j, "max", context);
  return out;
}

json scored_to_json(const ScoredParams& s) {
  json j = to_json(s.params);
  j["log_likelihood"] = s.log_likelihood;
  return j;
}

ScoredParams scored_from_json(const json& j) {
  return {params_from_json(j), require<double>(j, "log_likelihood", "scored parameters")};
}

json named_vector(const ParamVector& v) {
  json j = json::object();
  for (std::size_t i = 0; i < kParamCount; ++i) j[std::string(param_name(i))] = v[i];
  return j;
}

ParamVector vector_from_named(const json& j, std::string_view context) {
  ParamVector v{};
  for (std::size_t i = 0; i < kParamCount; ++i) v[i] = require<double>(j, param_name(i), context);
  return v;
}

}  // namespace

json to_json(const ModelParams& params) {
  json beta = json::object();
  for (std::size_t i = 0; i < kCoefCount; ++i) beta[std::string(coef_name(i))] = params.beta[i];
  return {{"sigma", params.sigma}, {"d", params.d}, {"beta", beta}};
}

ModelParams params_from_json(const json& j) {
  constexpr std::string_view ctx = "model parameters";
  ModelParams p;
  p.sigma = require<double>(j, "sigma", ctx);
  p.d = require<double>(j, "d", ctx);
  const json beta = require<json>(j, "beta", ctx);
  if (!beta.is_object()) throw ValidationError(std::string(ctx), {"'beta' must be an object"});
  std::vector<std::string> problems;
  for (const auto& [k, v] : beta.items()) {
    const auto idx = coef_index(k);
    if (!idx)
      problems.push_back(fmt::format("unknown coefficient '{}'", k));
    else if (!v.is_number())
      problems.push_back(fmt::format("coefficient '{}' is not a number", k));
    else
      p.beta[*idx] = v.get<double>();
  }
  if (!problems.empty()) throw ValidationError(std::string(ctx), std::move(problems));
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ValidationError(std::string(ctx), {e.what()});
  }
  return p;
}

json to_json(const ModelConfig& c) {
  return {{"discount_rate", c.discount_rate},
          {"max_term", c.max_term},
          {"min_age", c.min_age},
          {"never_renewed", to_string(c.never_renewed)},
          {"discount_costs_only", c.discount_costs_only},
          {"transform", {{"scale", c.transform.scale}, {"shift", c.transform.shift}}}};
}

ModelConfig model_config_from_json(const json& j) {
  constexpr std::string_view ctx = "model configuration";
  reject_unknown(j, {"discount_rate", "max_term", "min_age", "never_renewed", "discount_costs_only", "transform"}, ctx);
  ModelConfig c;
  read(j, "discount_rate", c.discount_rate, ctx);
  read(j, "max_term", c.max_term, ctx);
  read(j, "min_age", c.min_age, ctx);
  read(j, "discount_costs_only", c.discount_costs_only, ctx);
  std::string rule(to_string(c.never_renewed));
  read(j, "never_renewed", rule, ctx);
  if (rule == "first_fee_age")
    c.never_renewed = NeverRenewedRule::first_fee_age;
  else if (rule == "first_fee_at_min_age")
    c.never_renewed = NeverRenewedRule::first_fee_at_min_age;
  else
    throw ValidationError(std::string(ctx), {fmt::format("unknown never_renewed rule '{}'", rule)});
  if (j.contains("transform")) {
    const json t = j.at("transform");
    read(t, "scale", c.transform.scale, ctx);
    read(t, "shift", c.transform.shift, ctx);
  }
  c.validate();
  return c;
}

json to_json(const GaConfig& c) {
  return {{"population_size", c.population_size},
          {"generations", c.generations},
          {"starts", c.starts},
          {"elite_size", c.elite_size},
          {"tournament_size", c.tournament_size},
          {"crossover_rate", c.crossover_rate},
          {"mutation_rate", c.mutation_rate},
          {"mutation_scale", c.mutation_scale},
          {"mutation_final_fraction", c.mutation_final_fraction},
          {"blend_alpha", c.blend_alpha},
          {"elitism_fraction", c.elitism_fraction},
          {"encoding", c.encoding == GaEncodingKind::natural ? "natural" : "standardized"},
          {"seed", c.seed}};
}

GaConfig ga_config_from_json(const json& j) {
  constexpr std::string_view ctx = "GA configuration";
  reject_unknown(j, {"population_size", "generations", "starts", "elite_size", "tournament_size", "crossover_rate",
                     "mutation_rate", "mutation_scale", "mutation_final_fraction", "blend_alpha",
                     "elitism_fraction", "encoding", "seed"},
                 ctx);
  GaConfig c;
  read(j, "population_size", c.population_size, ctx);
  read(j, "generations", c.generations, ctx);
  read(j, "starts", c.starts, ctx);
  read(j, "elite_size", c.elite_size, ctx);
  read(j, "tournament_size", c.tournament_size, ctx);
  read(j, "crossover_rate", c.crossover_rate, ctx);
  read(j, "mutation_rate", c.mutation_rate, ctx);
  read(j, "mutation_scale", c.mutation_scale, ctx);
  read(j, "mutation_final_fraction", c.mutation_final_fraction, ctx);
  read(j, "blend_alpha", c.blend_alpha, ctx);
  read(j, "elitism_fraction", c.elitism_fraction, ctx);
  read(j, "seed", c.seed, ctx);
  std::string encoding = c.encoding == GaEncodingKind::natural ? "natural" : "standardized";
  read(j, "encoding", encoding, ctx);
  if (encoding == "natural")
    c.encoding = GaEncodingKind::natural;
  else if (encoding == "standardized")
    c.encoding = GaEncodingKind::standardized;
  else
    throw ValidationError(std::string(ctx), {fmt::format("unknown encoding '{}'", encoding)});
  c.validate();
  return c;
}

json to_json(const ParamBounds& b) {
  json j = json::object();
  for (std::size_t i = 0; i < kParamCount; ++i) j[std::string(param_name(i))] = {b.box[i].lo, b.box[i].hi};
  return j;
}

ParamBounds bounds_from_json(const json& j) {
  constexpr std::string_view ctx = "parameter bounds";
  if (!j.is_object()) throw ValidationError(std::string(ctx), {"expected a JSON object"});
  ParamBounds b = ParamBounds::defaults();
  std::vector<std::string> problems;
  for (const auto& [k, v] : j.items()) {
    std::size_t idx = kParamCount;
    for (std::size_t i = 0; i < kParamCount; ++i) {
      if (param_name(i) == k) idx = i;
    }
    if (idx == kParamCount) {
      problems.push_back(fmt::format("unknown parameter '{}'", k));
    } else if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      problems.push_back(fmt::format("'{}' must be a [lo, hi] pair", k));
    } else {
      b.box[idx] = {v[0].get<double>(), v[1].get<double>()};
    }
  }
  if (!problems.empty()) throw ValidationError(std::string(ctx), std::move(problems));
  b.validate();
  return b;
}

json to_json(const CovariateSpec& s) {
  json weights = json::object();
  for (std::size_t i = 0; i < kTechFieldCount; ++i) weights[std::string(to_string(kAllTechFields[i]))] = s.field_weights[i];
  return {{"family_size", to_json(s.family_size)},
          {"inventor_size", to_json(s.inventor_size)},
          {"grant_lag", to_json(s.grant_lag)},
          {"tech_scope", to_json(s.tech_scope)},
          {"field_weights", weights},
          {"foreign_share", s.foreign_share},
          {"first_application_year", s.first_application_year},
          {"last_application_year", s.last_application_year}};
}

CovariateSpec covariate_spec_from_json(const json& j) {
  constexpr std::string_view ctx = "covariate specification";
  reject_unknown(j, {"family_size", "inventor_size", "grant_lag", "tech_scope", "field_weights", "foreign_share",
                     "first_application_year", "last_application_year"},
                 ctx);
  CovariateSpec s = CovariateSpec::indian_cohort_defaults();
  if (j.contains("family_size")) s.family_size = count_from_json(j.at("family_size"), s.family_size, ctx);
  if (j.contains("inventor_size")) s.inventor_size = count_from_json(j.at("inventor_size"), s.inventor_size, ctx);
  if (j.contains("grant_lag")) s.grant_lag = count_from_json(j.at("grant_lag"), s.grant_lag, ctx);
  if (j.contains("tech_scope")) s.tech_scope = count_from_json(j.at("tech_scope"), s.tech_scope, ctx);
  if (j.contains("field_weights")) {
    const json& w = j.at("field_weights");
    if (!w.is_object()) throw ValidationError(std::string(ctx), {"'field_weights' must be an object"});
    for (const auto& [k, v] : w.items()) {
      const auto field = parse_tech_field(k);
      if (!field || !v.is_number())
        throw ValidationError(std::string(ctx), {fmt::format("bad field weight '{}'", k)});
      const auto pos = std::find(kAllTechFields.begin(), kAllTechFields.end(), *field) - kAllTechFields.begin();
      s.field_weights[static_cast<std::size_t>(pos)] = v.get<double>();
    }
  }
  read(j, "foreign_share", s.foreign_share, ctx);
  read(j, "first_application_year", s.first_application_year, ctx);
  read(j, "last_application_year", s.last_application_year, ctx);
  s.validate();
  return s;
}

json to_json(const FeeSchedule& schedule) {
  json entries = json::array();
  for (const auto& e : schedule.entries())
    entries.push_back({{"from", e.age_from}, {"to", e.age_to}, {"cost", e.annual_cost}});
  return {{"name", schedule.name()},
          {"currency", schedule.currency()},
          {"max_term", schedule.max_term()},
          {"entries", entries}};
}

json to_json(const EstimationDocument& doc) {
  const EstimationResult& r = doc.result;
  json elite = json::array();
  for (const auto& s : r.elite) elite.push_back(scored_to_json(s));
  json starts = json::array();
  for (const auto& s : r.starts) starts.push_back({{"seed", s.seed}, {"best_trajectory", s.best_trajectory}});
  json boundary = json::array();
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (r.boundary_hit[i]) boundary.push_back(param_name(i));
  }
  json j{{"point_estimate", to_json(r.point_estimate)},
         {"point_log_likelihood", r.point_log_likelihood},
         {"std_errors", {{"kind", "elite dispersion"}, {"values", named_vector(r.std_errors)}}},
         {"best", scored_to_json(r.best)},
         {"elite", elite},
         {"diagnostics",
          {{"starts", starts},
           {"boundary_hits", boundary},
           {"non_monotone_evaluations", r.non_monotone_evaluations}}},
         {"config",
          {{"ga", to_json(doc.ga)},
           {"bounds", to_json(doc.bounds)},
           {"model", to_json(doc.model)},
           {"schedule", doc.schedule_name},
           {"records", doc.records}}},
         {"seed", doc.ga.seed},
         {"metadata",
          {{"operators",
            "tournament selection, BLX-alpha blend crossover, Gaussian mutation with geometric annealing, "
            "clipping to bounds, elitism"},
           {"operator_defaults", "engineering choices, not taken from the estimation literature"}}}};
  if (r.refined) j["refined"] = scored_to_json(*r.refined);
  return j;
}

EstimationDocument estimation_from_json(const json& j) {
  constexpr std::string_view ctx = "estimation result";
  EstimationDocument doc;
  EstimationResult& r = doc.result;
  r.point_estimate = params_from_json(require<json>(j, "point_estimate", ctx));
  r.point_log_likelihood = require<double>(j, "point_log_likelihood", ctx);
  r.best = scored_from_json(require<json>(j, "best", ctx));
  if (j.contains("refined")) r.refined = scored_from_json(j.at("refined"));
  if (j.contains("std_errors")) r.std_errors = vector_from_named(j.at("std_errors").at("values"), ctx);
  if (j.contains("elite")) {
    const json& elite = j.at("elite");
    if (!elite.is_array()) throw ValidationError(std::string(ctx), {"'elite' must be an array"});
    for (const auto& e : elite) r.elite.push_back(scored_from_json(e));
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    read(d, "non_monotone_evaluations", r.non_monotone_evaluations, ctx);
    if (d.contains("starts")) {
      for (const auto& s : d.at("starts"))
        r.starts.push_back({require<std::uint64_t>(s, "seed", ctx), require<std::vector<double>>(s, "best_trajectory", ctx)});
    }
    if (d.contains("boundary_hits")) {
      for (const auto& name : d.at("boundary_hits")) {
        for (std::size_t i = 0; i < kParamCount; ++i) {
          if (name.is_string() && param_name(i) == name.get<std::string>()) r.boundary_hit[i] = true;
        }
      }
    }
  }
  if (j.contains("config")) {
    const json& c = j.at("config");
    if (c.contains("ga")) doc.ga = ga_config_from_json(c.at("ga"));
    if (c.contains("bounds")) doc.bounds = bounds_from_json(c.at("bounds"));
    if (c.contains("model")) doc.model = model_config_from_json(c.at("model"));
    read(c, "schedule", doc.schedule_name, ctx);
    read(c, "records", doc.records, ctx);
  }
  return doc;
}

json parse_json(std::string_view text, std::string_view context) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(context), {fmt::format("malformed JSON: {}", e.what())});
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace patent_rent
