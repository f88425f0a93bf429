#include "patent_rent/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <unordered_map>

#include "patent_rent/data_io.hpp"
#include "patent_rent/errors.hpp"
#include "patent_rent/likelihood.hpp"
#include "text_util.hpp"

namespace patent_rent {

namespace {

using detail::format_double;

double percent(double part, double whole) { return whole != 0.0 ? 100.0 * part / whole : 0.0; }

std::unordered_map<std::string_view, const ValueEstimate*> index_estimates(
    std::span<const ValueEstimate> estimates) {
  std::unordered_map<std::string_view, const ValueEstimate*> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.emplace(e.patent_id, &e);
  return out;
}

const ValueEstimate& lookup(const std::unordered_map<std::string_view, const ValueEstimate*>& index,
                            const PatentRecord& rec) {
  auto it = index.find(rec.patent_id);
  if (it == index.end())
    throw ReportingError(fmt::format("no value estimate for patent '{}'", rec.patent_id));
  return *it->second;
}

std::string quantile_column_name(double level) {
  return fmt::format("r0_q{:02}", static_cast<int>(std::lround(level * 100.0)));
}

// Aligned table: first column left-justified, the rest right-justified.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  std::vector<std::size_t> width(cols, 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c == 0)
        line += fmt::format("{:<{}}", r[c], width[c]);
      else
        line += fmt::format("  {:>{}}", r[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

int expiry_bucket(int expiry_age) noexcept {
  if (expiry_age == 2) return 0;
  if (expiry_age >= 3 && expiry_age <= 6) return 1;
  if (expiry_age >= 7 && expiry_age <= 10) return 2;
  if (expiry_age >= 11 && expiry_age <= 15) return 3;
  if (expiry_age >= 16 && expiry_age <= 20) return 4;
  return -1;
}

std::string_view field_display_label(TechField field) noexcept {
  switch (field) {
    case TechField::chemical: return "Chemical";
    case TechField::mechanical: return "Mechanical";
    case TechField::electrical: return "Electrical";
    case TechField::instruments: return "Instruments";
    case TechField::others: return "Others";
  }
  return "Others";
}

std::string_view ownership_display_label(Ownership ownership) noexcept {
  return ownership == Ownership::foreign_subsidiary ? "Foreign Subsidiary" : "Domestic Firms";
}

ExpiryShareTable expiry_share_table(std::span<const PatentRecord> records) {
  ExpiryShareTable table;
  const auto make_row = [](std::string label, const std::vector<const PatentRecord*>& members) {
    ExpiryShareRow row;
    row.label = std::move(label);
    row.total = members.size();
    std::array<std::size_t, 5> counts{};
    for (const auto* r : members) {
      const int b = expiry_bucket(r->expiry_age);
      if (b < 0) throw ReportingError(fmt::format("patent '{}' has expiry age {} outside 2..20", r->patent_id, r->expiry_age));
      ++counts[static_cast<std::size_t>(b)];
    }
    for (std::size_t b = 0; b < 5; ++b)
      row.percent[b] = percent(static_cast<double>(counts[b]), static_cast<double>(members.size()));
    return row;
  };
  std::vector<const PatentRecord*> all;
  for (const auto& r : records) all.push_back(&r);
  for (TechField f : kAllTechFields) {
    std::vector<const PatentRecord*> members;
    for (const auto* r : all) {
      if (r->covariates.tech_field == f) members.push_back(r);
    }
    if (!members.empty()) table.rows.push_back(make_row(std::string(field_display_label(f)), members));
  }
  if (!all.empty()) table.rows.push_back(make_row("Average", all));
  return table;
}

GroupedValueTable value_by_group(std::span<const PatentRecord> records,
                                 std::span<const ValueEstimate> estimates, GroupKey key,
                                 MoneyField field, double deflator) {
  const auto index = index_estimates(estimates);
  GroupedValueTable table;
  table.key = key;
  table.field = field;
  table.deflator = deflator;

  struct Bucket {
    std::string label;
    std::vector<double> values;
  };
  std::vector<Bucket> buckets;
  std::vector<int> slot_of;  // group id -> bucket index
  if (key == GroupKey::technology) {
    for (TechField f : kAllTechFields) buckets.push_back({std::string(field_display_label(f)), {}});
  } else {
    buckets.push_back({std::string(ownership_display_label(Ownership::foreign_subsidiary)), {}});
    buckets.push_back({std::string(ownership_display_label(Ownership::domestic)), {}});
  }

  double grand = 0.0;
  for (const auto& rec : records) {
    const ValueEstimate& est = lookup(index, rec);
    const double v = (field == MoneyField::r0 ? est.r0_mean : est.npv_mean) * deflator;
    std::size_t b;
    if (key == GroupKey::technology) {
      b = static_cast<std::size_t>(std::find(kAllTechFields.begin(), kAllTechFields.end(),
                                             rec.covariates.tech_field) - kAllTechFields.begin());
    } else {
      b = rec.covariates.ownership == Ownership::foreign_subsidiary ? 0 : 1;
    }
    buckets[b].values.push_back(v);
  }
  std::vector<double> sums;
  for (const auto& b : buckets) {
    sums.push_back(pairwise_sum(b.values));
    grand += sums.back();
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    auto& b = buckets[i];
    if (b.values.empty()) continue;
    GroupRow row;
    row.label = b.label;
    row.count = b.values.size();
    row.patent_share = percent(static_cast<double>(b.values.size()), static_cast<double>(records.size()));
    row.value_share = percent(sums[i], grand);
    row.mean = sums[i] / static_cast<double>(b.values.size());
    std::sort(b.values.begin(), b.values.end());
    row.median = quantile_sorted(b.values, 0.5);
    table.rows.push_back(std::move(row));
  }
  return table;
}

QuantileTable quantile_table(std::span<const PatentRecord> records,
                             std::span<const ValueEstimate> estimates, std::span<const double> levels,
                             double deflator) {
  const auto index = index_estimates(estimates);
  QuantileTable table;
  table.levels.assign(levels.begin(), levels.end());
  for (TechField f : kAllTechFields) {
    std::vector<double> values;
    for (const auto& rec : records) {
      if (rec.covariates.tech_field == f) values.push_back(lookup(index, rec).npv_mean * deflator);
    }
    if (values.empty()) continue;
    QuantileColumn col;
    col.label = std::string(field_display_label(f));
    const SummaryStats s = summarize(values);
    col.mean = s.mean;
    col.sd = s.sd;
    col.count = s.count;
    std::sort(values.begin(), values.end());
    for (double p : levels) col.quantiles.push_back(quantile_sorted(values, p));
    table.columns.push_back(std::move(col));
  }
  return table;
}

std::vector<AgeTrendPoint> age_trend(std::span<const PatentRecord> records,
                                     std::span<const ValueEstimate> estimates) {
  const auto index = index_estimates(estimates);
  std::map<int, std::vector<double>> by_age;
  for (const auto& rec : records) by_age[rec.expiry_age].push_back(lookup(index, rec).log_r0_mean);
  std::vector<AgeTrendPoint> out;
  for (const auto& [age, values] : by_age)
    out.push_back({age, values.size(), pairwise_sum(values) / static_cast<double>(values.size())});
  return out;
}

std::string to_csv(const ExpiryShareTable& table) {
  std::string out = "technology";
  for (auto label : kExpiryBucketLabels) out += fmt::format(",{}", label);
  out += ",total_patents\n";
  for (const auto& r : table.rows) {
    out += detail::csv_escape(r.label);
    for (double p : r.percent) out += "," + format_double(p);
    out += fmt::format(",{}\n", r.total);
  }
  return out;
}

std::string to_csv(const GroupedValueTable& table) {
  std::string out = fmt::format("{},count,patent_share,value_share,mean,median\n",
                                table.key == GroupKey::technology ? "technology" : "ownership");
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", detail::csv_escape(r.label), r.count,
                       format_double(r.patent_share), format_double(r.value_share),
                       format_double(r.mean), format_double(r.median));
  }
  return out;
}

std::string to_csv(const QuantileTable& table) {
  std::string out = "statistic";
  for (const auto& c : table.columns) out += "," + detail::csv_escape(c.label);
  out += '\n';
  for (std::size_t q = 0; q < table.levels.size(); ++q) {
    out += fmt::format("q{}", format_double(table.levels[q] * 100.0));
    for (const auto& c : table.columns) out += "," + format_double(c.quantiles[q]);
    out += '\n';
  }
  out += "mean";
  for (const auto& c : table.columns) out += "," + format_double(c.mean);
  out += "\nsd";
  for (const auto& c : table.columns) out += "," + format_double(c.sd);
  out += "\nobs";
  for (const auto& c : table.columns) out += fmt::format(",{}", c.count);
  out += '\n';
  return out;
}

std::string to_csv(std::span<const AgeTrendPoint> trend) {
  std::string out = "expiry_age,patents,mean_log_r0\n";
  for (const auto& p : trend)
    out += fmt::format("{},{},{}\n", p.expiry_age, p.patents, format_double(p.mean_log_r0));
  return out;
}

std::string render_text(const ExpiryShareTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Technology Category"};
  for (auto label : kExpiryBucketLabels) header.emplace_back(label);
  header.emplace_back("Total Patents");
  rows.push_back(std::move(header));
  for (const auto& r : table.rows) {
    std::vector<std::string> line{r.label};
    for (double p : r.percent) line.push_back(fmt::format("{:.3f}", p));
    line.push_back(fmt::format("{}", r.total));
    rows.push_back(std::move(line));
  }
  return "Technology-wise patent expiration at different age (in percentage)\n\n" + align(rows);
}

std::string render_text(const GroupedValueTable& by_technology, const GroupedValueTable& by_ownership,
                        const TextStyle& style) {
  const std::string title = by_technology.field == MoneyField::r0
                                ? fmt::format("Estimated mean value ({}) of initial returns r(0) at time 0 by technology and ownership", style.unit_label)
                                : fmt::format("Share of patents and mean net present value ({}) by technology and ownership", style.unit_label);
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Technology/Ownership", "Patent Share", "Value Share",
                  fmt::format("Mean ({})", style.unit_label), fmt::format("Median ({})", style.unit_label)});
  const auto emit = [&](const GroupedValueTable& t) {
    for (const auto& r : t.rows) {
      rows.push_back({r.label, fmt::format("{:.2f}", r.patent_share), fmt::format("{:.2f}", r.value_share),
                      fmt::format("{:.3f}", r.mean / style.unit_divisor),
                      fmt::format("{:.3f}", r.median / style.unit_divisor)});
    }
  };
  emit(by_technology);
  rows.push_back({});
  emit(by_ownership);
  return title + "\n\n" + align(rows);
}

std::string render_text(const QuantileTable& table, const TextStyle& style) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Quantile (%)"};
  for (const auto& c : table.columns) header.push_back(c.label);
  rows.push_back(std::move(header));
  for (std::size_t q = 0; q < table.levels.size(); ++q) {
    std::vector<std::string> line{fmt::format("{}%", format_double(table.levels[q] * 100.0))};
    for (const auto& c : table.columns) line.push_back(fmt::format("{:.3f}", c.quantiles[q] / style.unit_divisor));
    rows.push_back(std::move(line));
  }
  std::vector<std::string> mean{"Mean"}, sd{"Std. Dev."}, obs{"Obs."};
  for (const auto& c : table.columns) {
    mean.push_back(fmt::format("{:.3f}", c.mean / style.unit_divisor));
    sd.push_back(fmt::format("{:.3f}", c.sd / style.unit_divisor));
    obs.push_back(fmt::format("{}", c.count));
  }
  rows.push_back(std::move(mean));
  rows.push_back(std::move(sd));
  rows.push_back(std::move(obs));
  return fmt::format("Distribution of the discounted lifetime value of patent right ({})\n\n", style.unit_label) +
         align(rows);
}

std::string value_table_csv(std::span<const ValueEstimate> estimates) {
  std::vector<double> levels;
  if (!estimates.empty()) {
    for (const auto& [p, v] : estimates.front().r0_quantiles) levels.push_back(p);
  } else {
    levels.assign(std::begin(kReportedQuantiles), std::end(kReportedQuantiles));
  }
  std::string out = "patent_id,expiry_age,draws_used,mc_reliable,log_r0_mean,r0_mean,r0_mean_se,r0_median";
  for (double p : levels) out += "," + quantile_column_name(p);
  out += ",npv_mean,npv_mean_se,npv_median,ensemble_log_r0,ensemble_band_lower,ensemble_band_upper,"
         "ensemble_realizations,ensemble_skipped\n";
  for (const auto& e : estimates) {
    out += fmt::format("{},{},{},{},{},{},{},{}", detail::csv_escape(e.patent_id), e.expiry_age,
                       e.draws_used, e.mc_reliable ? "true" : "false", format_double(e.log_r0_mean),
                       format_double(e.r0_mean), format_double(e.r0_mean_se), format_double(e.r0_median));
    for (const auto& [p, v] : e.r0_quantiles) out += "," + format_double(v);
    out += fmt::format(",{},{},{}", format_double(e.npv_mean), format_double(e.npv_mean_se),
                       format_double(e.npv_median));
    if (e.ensemble) {
      const auto& s = *e.ensemble;
      out += fmt::format(",{},{},{},{},{}\n", format_double(s.log_r0), format_double(s.band_lower),
                         format_double(s.band_upper), s.realizations, s.skipped);
    } else {
      out += ",,,,,\n";
    }
  }
  return out;
}

std::vector<ValueEstimate> parse_value_table(std::string_view csv) {
  const auto lines = detail::split_lines(csv);
  if (lines.empty()) throw ValidationError("value table", {"missing header row"});
  const auto header = detail::split_csv_line(detail::trim(lines.front()));
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);
  std::vector<std::string> missing;
  for (std::string_view name : {"patent_id", "expiry_age", "draws_used", "mc_reliable", "log_r0_mean",
                                "r0_mean", "r0_mean_se", "r0_median", "npv_mean", "npv_mean_se",
                                "npv_median", "ensemble_log_r0", "ensemble_band_lower",
                                "ensemble_band_upper", "ensemble_realizations", "ensemble_skipped"}) {
    if (!col.contains(name)) missing.push_back(fmt::format("missing column '{}'", name));
  }
  if (!missing.empty()) throw ValidationError("value table", std::move(missing));
  std::vector<std::pair<double, std::size_t>> quantile_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    int pct = 0;
    if (header[i].rfind("r0_q", 0) == 0 && detail::parse_int(std::string_view(header[i]).substr(4), pct))
      quantile_cols.emplace_back(pct / 100.0, i);
  }

  std::vector<ValueEstimate> out;
  std::vector<std::string> problems;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (detail::trim(lines[li]).empty()) continue;
    const auto f = detail::split_csv_line(detail::trim(lines[li]));
    if (f.size() != header.size()) {
      problems.push_back(fmt::format("line {}: expected {} fields", li + 1, header.size()));
      continue;
    }
    const auto get = [&](std::string_view name) -> const std::string& { return f[col.find(name)->second]; };
    ValueEstimate e;
    e.patent_id = get("patent_id");
    int draws = 0;
    bool ok = detail::parse_int(get("expiry_age"), e.expiry_age) && detail::parse_int(get("draws_used"), draws) &&
              detail::parse_double(get("log_r0_mean"), e.log_r0_mean) &&
              detail::parse_double(get("r0_mean"), e.r0_mean) &&
              detail::parse_double(get("r0_mean_se"), e.r0_mean_se) &&
              detail::parse_double(get("r0_median"), e.r0_median) &&
              detail::parse_double(get("npv_mean"), e.npv_mean) &&
              detail::parse_double(get("npv_mean_se"), e.npv_mean_se) &&
              detail::parse_double(get("npv_median"), e.npv_median);
    e.draws_used = static_cast<std::size_t>(std::max(draws, 0));
    e.mc_reliable = get("mc_reliable") == "true";
    for (const auto& [p, i] : quantile_cols) {
      double v = 0.0;
      ok = ok && detail::parse_double(f[i], v);
      e.r0_quantiles.emplace_back(p, v);
    }
    if (!get("ensemble_log_r0").empty()) {
      EnsembleSummary s;
      int real = 0, skipped = 0;
      ok = ok && detail::parse_double(get("ensemble_log_r0"), s.log_r0) &&
           detail::parse_double(get("ensemble_band_lower"), s.band_lower) &&
           detail::parse_double(get("ensemble_band_upper"), s.band_upper) &&
           detail::parse_int(get("ensemble_realizations"), real) &&
           detail::parse_int(get("ensemble_skipped"), skipped);
      s.realizations = static_cast<std::size_t>(std::max(real, 0));
      s.skipped = static_cast<std::size_t>(std::max(skipped, 0));
      e.ensemble = s;
    }
    if (!ok) {
      problems.push_back(fmt::format("line {}: malformed value row", li + 1));
      continue;
    }
    out.push_back(std::move(e));
  }
  if (!problems.empty()) throw ValidationError("value table", std::move(problems));
  return out;
}

}  // namespace patent_rent
