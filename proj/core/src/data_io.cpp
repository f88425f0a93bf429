#include "patent_rent/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <set>

#include "patent_rent/errors.hpp"
#include "patent_rent/likelihood.hpp"
#include "patent_rent/random.hpp"
#include "text_util.hpp"

namespace patent_rent {

namespace {

using detail::format_double;

bool parse_count(std::string_view text, double min, double& out) {
  return detail::parse_double(text, out) && out >= min && std::floor(out) == out;
}

std::optional<bool> parse_bool(std::string_view text) {
  const std::string v = detail::to_lower(detail::trim(text));
  if (v == "true") return true;
  if (v == "false") return false;
  return std::nullopt;
}

double draw_count(const CountDistribution& dist, Rng& rng) {
  double v = dist.min;
  const double excess = dist.mean - dist.min;
  switch (dist.kind) {
    case CountDistribution::Kind::constant: v = dist.mean; break;
    case CountDistribution::Kind::poisson: v += static_cast<double>(rng.poisson(excess)); break;
    case CountDistribution::Kind::negative_binomial:
      v += static_cast<double>(rng.negative_binomial(excess, dist.sd * dist.sd));
      break;
  }
  if (dist.max) v = std::min(v, *dist.max);
  return v;
}

}  // namespace

void IpcPrefixMap::add(std::string prefix, TechField field) {
  map_[detail::to_lower(detail::trim(prefix))] = field;
}

std::optional<TechField> IpcPrefixMap::lookup(std::string_view ipc_code) const {
  const std::string code = detail::to_lower(detail::trim(ipc_code));
  if (code.size() < 4) return std::nullopt;
  if (auto it = map_.find(std::string_view(code).substr(0, 4)); it != map_.end()) return it->second;
  return std::nullopt;
}

IpcPrefixMap IpcPrefixMap::parse(std::string_view text) {
  IpcPrefixMap out;
  std::vector<std::string> problems;
  std::size_t line_no = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    const std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(fmt::format("line {}: expected 'PREFIX = field'", line_no));
      continue;
    }
    const std::string_view prefix = detail::trim(line.substr(0, eq));
    const auto field = parse_tech_field(detail::to_lower(detail::trim(line.substr(eq + 1))));
    if (prefix.size() != 4 || !field) {
      problems.push_back(fmt::format("line {}: expected a 4-character prefix and a field label", line_no));
      continue;
    }
    out.add(std::string(prefix), *field);
  }
  if (!problems.empty()) throw ValidationError("invalid IPC prefix map", std::move(problems));
  return out;
}

ParsedRecords parse_records(std::string_view tabular_text, const IpcPrefixMap* prefix_map) {
  if (tabular_text.substr(0, 3) == "\xEF\xBB\xBF") tabular_text.remove_prefix(3);
  auto lines = detail::split_lines(tabular_text);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw ValidationError("records file", {"missing header row"});

  const auto header = detail::split_csv_line(detail::trim(lines[first]));
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.size(); ++i)
    column.emplace(detail::to_lower(detail::trim(header[i])), i);

  std::vector<std::string> missing;
  for (auto name : kRecordColumns) {
    if (!column.contains(name)) missing.push_back(fmt::format("missing required column '{}'", name));
  }
  if (!missing.empty()) throw ValidationError("records file", std::move(missing));

  ParsedRecords out;
  for (const auto& [name, idx] : column) {
    if (std::find(kRecordColumns.begin(), kRecordColumns.end(), name) == kRecordColumns.end())
      out.report.warnings.push_back(fmt::format("ignoring unknown column '{}'", name));
  }

  std::set<std::string, std::less<>> seen_ids;
  std::size_t row = 0;
  for (std::size_t li = first + 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    ++row;
    const auto fields = detail::split_csv_line(detail::trim(lines[li]));
    if (fields.size() != header.size()) {
      out.report.rejected.push_back(
          {row, fmt::format("expected {} fields, found {}", header.size(), fields.size())});
      continue;
    }
    const auto field = [&](std::string_view name) {
      return detail::trim(fields[column.find(name)->second]);
    };

    std::vector<std::string> reasons;
    PatentRecord rec;
    rec.patent_id = std::string(field("patent_id"));
    if (rec.patent_id.empty()) reasons.emplace_back("empty patent_id");
    if (!detail::parse_int(field("application_year"), rec.application_year))
      reasons.push_back(fmt::format("application_year '{}' is not an integer", field("application_year")));
    if (!detail::parse_int(field("expiry_age"), rec.expiry_age))
      reasons.push_back(fmt::format("expiry_age '{}' is not an integer", field("expiry_age")));
    else if (rec.expiry_age < 2 || rec.expiry_age > 20)
      reasons.push_back(fmt::format("expiry_age {} outside [2, 20]", rec.expiry_age));

    auto& x = rec.covariates;
    if (!parse_count(field("family_size"), 0.0, x.family_size))
      reasons.push_back(fmt::format("family_size '{}' is not a count >= 0", field("family_size")));
    if (!parse_count(field("inventor_count"), 1.0, x.inventor_size))
      reasons.push_back(fmt::format("inventor_count '{}' is not a count >= 1", field("inventor_count")));
    if (!detail::parse_double(field("grant_lag_years"), x.grant_lag) || x.grant_lag < 0.0)
      reasons.push_back(fmt::format("grant_lag_years '{}' is not a number >= 0", field("grant_lag_years")));
    if (!parse_count(field("tech_scope"), 1.0, x.tech_scope))
      reasons.push_back(fmt::format("tech_scope '{}' is not a count >= 1", field("tech_scope")));

    rec.raw_tech_field = std::string(field("tech_field"));
    auto tf = parse_tech_field(detail::to_lower(rec.raw_tech_field));
    if (!tf && prefix_map != nullptr) tf = prefix_map->lookup(rec.raw_tech_field);
    if (tf)
      x.tech_field = *tf;
    else
      reasons.push_back(fmt::format("unknown tech_field '{}'", rec.raw_tech_field));

    rec.raw_ownership = std::string(field("ownership"));
    if (auto own = parse_ownership(detail::to_lower(rec.raw_ownership)))
      x.ownership = *own;
    else
      reasons.push_back(fmt::format("unknown ownership '{}'", rec.raw_ownership));

    const auto censored = parse_bool(field("censored"));
    if (!censored) reasons.push_back(fmt::format("censored '{}' is not true/false", field("censored")));

    if (reasons.empty() && seen_ids.contains(rec.patent_id))
      reasons.push_back(fmt::format("duplicate patent_id '{}'", rec.patent_id));

    if (!reasons.empty()) {
      std::string joined = reasons.front();
      for (std::size_t k = 1; k < reasons.size(); ++k) joined += "; " + reasons[k];
      out.report.rejected.push_back({row, std::move(joined)});
      continue;
    }
    if (*censored) {
      out.report.rejected.push_back({row, "censored (non-expired) patent dropped"});
      out.report.warnings.push_back(
          fmt::format("row {}: patent '{}' is censored and was dropped", row, rec.patent_id));
      continue;
    }
    seen_ids.insert(rec.patent_id);
    out.records.push_back(std::move(rec));
  }
  out.report.accepted = out.records.size();
  return out;
}

std::string serialize_records(std::span<const PatentRecord> records) {
  std::string out;
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) {
    if (i) out += ',';
    out += kRecordColumns[i];
  }
  out += '\n';
  for (const auto& r : records) {
    const auto& x = r.covariates;
    const std::string field = r.raw_tech_field.empty() ? std::string(to_string(x.tech_field)) : r.raw_tech_field;
    const std::string own = r.raw_ownership.empty() ? std::string(to_string(x.ownership)) : r.raw_ownership;
    out += fmt::format("{},{},{},{},{},{},{},{},{},false\n", detail::csv_escape(r.patent_id),
                       r.application_year, r.expiry_age, format_double(x.family_size),
                       format_double(x.inventor_size), format_double(x.grant_lag),
                       format_double(x.tech_scope), detail::csv_escape(field), detail::csv_escape(own));
  }
  return out;
}

CovariateSpec CovariateSpec::indian_cohort_defaults() {
  CovariateSpec s;
  using K = CountDistribution::Kind;
  s.family_size = {K::negative_binomial, 2.99, 7.5, 0.0, std::nullopt};
  s.inventor_size = {K::negative_binomial, 2.45, 1.7, 1.0, std::nullopt};
  s.grant_lag = {K::poisson, 7.25, 0.0, 2.0, std::nullopt};
  s.tech_scope = {K::poisson, 1.06, 0.0, 1.0, std::nullopt};
  // kAllTechFields order: chemical, mechanical, instruments, electrical, others.
  s.field_weights = {237.0, 100.0, 31.0, 170.0, 17.0};
  s.foreign_share = 0.3358;
  return s;
}

void CovariateSpec::validate() const {
  std::vector<std::string> v;
  const auto check = [&](const CountDistribution& d, std::string_view name, double floor) {
    if (!std::isfinite(d.mean) || !std::isfinite(d.min) || d.min < floor)
      v.push_back(fmt::format("{}: min must be finite and >= {}", name, floor));
    if (d.mean < d.min) v.push_back(fmt::format("{}: mean {} below min {}", name, d.mean, d.min));
    if (d.max && *d.max < d.min) v.push_back(fmt::format("{}: max below min", name));
    if (d.kind == CountDistribution::Kind::negative_binomial && !(d.sd >= 0.0))
      v.push_back(fmt::format("{}: sd must be >= 0", name));
  };
  check(family_size, "family_size", 0.0);
  check(inventor_size, "inventor_size", 1.0);
  check(grant_lag, "grant_lag", 0.0);
  check(tech_scope, "tech_scope", 1.0);
  double total = 0.0;
  for (double w : field_weights) {
    if (!(w >= 0.0)) v.emplace_back("field weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) v.emplace_back("field weights must not all be zero");
  if (!(foreign_share >= 0.0 && foreign_share <= 1.0)) v.emplace_back("foreign_share must lie in [0, 1]");
  if (first_application_year > last_application_year) v.emplace_back("application year range is empty");
  if (!v.empty()) throw ConfigurationError(ValidationError("invalid covariate spec", v).what());
}

std::vector<PatentRecord> generate_synthetic(const ModelParams& true_params, std::size_t n,
                                             const FeeSchedule& schedule, const ModelConfig& config,
                                             const CovariateSpec& spec, std::uint64_t seed) {
  if (n < 1) throw DomainError("synthetic cohort size must be at least 1");
  true_params.validate();
  config.validate();
  spec.validate();
  const ThresholdTable table = build_threshold_table(schedule, true_params.d, config);
  const double weight_total =
      std::accumulate(spec.field_weights.begin(), spec.field_weights.end(), 0.0);
  const int width = std::max(6, static_cast<int>(std::to_string(n).size()));

  std::vector<PatentRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, {i}));
    PatentRecord& rec = out[i];
    rec.patent_id = fmt::format("SYN{:0{}}", i + 1, width);

    double pick = rng.uniform() * weight_total;
    TechField field = kAllTechFields.back();
    for (std::size_t f = 0; f < kTechFieldCount; ++f) {
      if (pick < spec.field_weights[f]) {
        field = kAllTechFields[f];
        break;
      }
      pick -= spec.field_weights[f];
    }
    auto& x = rec.covariates;
    x.tech_field = field;
    x.ownership = rng.bernoulli(spec.foreign_share) ? Ownership::foreign_subsidiary : Ownership::domestic;
    const auto years =
        static_cast<std::size_t>(spec.last_application_year - spec.first_application_year + 1);
    rec.application_year = spec.first_application_year + static_cast<int>(rng.index(years));
    x.family_size = draw_count(spec.family_size, rng);
    x.inventor_size = draw_count(spec.inventor_size, rng);
    x.grant_lag = draw_count(spec.grant_lag, rng);
    x.tech_scope = draw_count(spec.tech_scope, rng);
    rec.raw_tech_field = std::string(to_string(x.tech_field));
    rec.raw_ownership = std::string(to_string(x.ownership));

    const double log_r0 = linear_index(true_params.beta, x, config.transform) + true_params.sigma * rng.normal();
    int age = config.max_term;
    if (log_r0 < table.at(config.min_age)) {
      age = config.min_age;
    } else {
      for (int t = config.min_age + 1; t < config.max_term; ++t) {
        if (table.at(t) > log_r0) {
          age = t;
          break;
        }
      }
    }
    rec.expiry_age = age;
  }
  return out;
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(values.size());
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
    s.sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size() - 1));
  }
  return s;
}

namespace {

std::array<double, 5> variables_of(const PatentRecord& r) {
  const auto& x = r.covariates;
  return {x.tech_scope, x.inventor_size, x.family_size, static_cast<double>(r.expiry_age), x.grant_lag};
}

DescriptiveStats::Group summarize_group(std::string label, const std::vector<const PatentRecord*>& members) {
  DescriptiveStats::Group g;
  g.label = std::move(label);
  g.observations = members.size();
  for (std::size_t v = 0; v < kDescriptiveVariables.size(); ++v) {
    std::vector<double> col;
    col.reserve(members.size());
    for (const auto* r : members) col.push_back(variables_of(*r)[v]);
    g.variables[v] = summarize(col);
  }
  return g;
}

}  // namespace

DescriptiveStats descriptive_stats(std::span<const PatentRecord> records) {
  if (records.empty()) throw DomainError("descriptive statistics of an empty record list");
  DescriptiveStats out;
  std::vector<const PatentRecord*> all;
  for (const auto& r : records) all.push_back(&r);
  for (TechField f : kAllTechFields) {
    std::vector<const PatentRecord*> members;
    for (const auto* r : all) {
      if (r->covariates.tech_field == f) members.push_back(r);
    }
    if (!members.empty()) out.by_field.push_back(summarize_group(std::string(to_string(f)), members));
  }
  out.overall = summarize_group("all", all);
  out.mean_renewal_age = out.overall.variables[3].mean;

  // tech_scope, inventor_size, family_size, grant_lag
  constexpr std::array<std::size_t, 4> kCols = {0, 1, 2, 4};
  std::array<std::vector<double>, 4> cols;
  for (const auto* r : all) {
    const auto v = variables_of(*r);
    for (std::size_t k = 0; k < 4; ++k) cols[k].push_back(v[kCols[k]]);
  }
  std::array<double, 4> means{};
  for (std::size_t k = 0; k < 4; ++k) means[k] = out.overall.variables[kCols[k]].mean;
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double sab = 0.0, saa = 0.0, sbb = 0.0;
      for (std::size_t i = 0; i < all.size(); ++i) {
        const double da = cols[a][i] - means[a];
        const double db = cols[b][i] - means[b];
        sab += da * db;
        saa += da * da;
        sbb += db * db;
      }
      out.correlations[a][b] = a == b ? 1.0
                               : (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb)
                                                          : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::string descriptive_stats_csv(const DescriptiveStats& stats) {
  std::string out = "group,variable,count,mean,sd,min,max\n";
  const auto emit = [&](const DescriptiveStats::Group& g) {
    for (std::size_t v = 0; v < kDescriptiveVariables.size(); ++v) {
      const auto& s = g.variables[v];
      out += fmt::format("{},{},{},{},{},{},{}\n", g.label, kDescriptiveVariables[v], s.count,
                         format_double(s.mean), format_double(s.sd), format_double(s.min),
                         format_double(s.max));
    }
  };
  for (const auto& g : stats.by_field) emit(g);
  emit(stats.overall);
  out += "\ncorrelation,tech_scope,inventor_size,family_size,grant_lag\n";
  constexpr std::array<std::string_view, 4> kNames = {"tech_scope", "inventor_size", "family_size", "grant_lag"};
  for (std::size_t a = 0; a < 4; ++a) {
    out += kNames[a];
    for (std::size_t b = 0; b < 4; ++b) out += "," + format_double(stats.correlations[a][b]);
    out += '\n';
  }
  return out;
}

}  // namespace patent_rent
