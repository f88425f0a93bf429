#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <ostream>
#include <thread>

#include "manifest.hpp"
#include "patent_rent/data_io.hpp"
#include "patent_rent/errors.hpp"
#include "patent_rent/ga_estimator.hpp"
#include "patent_rent/reporting.hpp"
#include "patent_rent/serialization.hpp"
#include "patent_rent/value_simulator.hpp"

namespace patent_rent::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct LoadedRecords {
  std::vector<PatentRecord> records;
  json ingest;
};

std::string detail_format(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string absolute_string(const std::string& path) { return fs::absolute(path).lexically_normal().string(); }

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("PATENT_RENT_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096)
      throw ConfigurationError(fmt::format("PATENT_RENT_THREADS must be a positive integer (got '{}')", env));
    return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Built-in names win only when no file of that name exists.
FeeSchedule resolve_schedule(const std::string& ref, RunManifest& manifest, std::string& canonical) {
  const bool file = fs::is_regular_file(ref);
  if (is_builtin_schedule(ref)) {
    if (file)
      throw ConfigurationError(fmt::format(
          "schedule '{}' is both a built-in name and a file in the working directory; pass ./{} for the file",
          ref, ref));
    canonical = ref;
    return builtin_schedule(ref);
  }
  if (!file)
    throw ConfigurationError(fmt::format("schedule '{}' is neither a built-in ({}) nor a readable file", ref,
                                         fmt::join(builtin_schedule_names(), ", ")));
  const std::string text = read_file(ref);
  manifest.add_input("schedule", ref, text);
  canonical = absolute_string(ref);
  return load_schedule(text);
}

json ingest_json(const IngestReport& report) {
  json rejected = json::array();
  for (const auto& r : report.rejected) rejected.push_back({{"row", r.row}, {"reason", r.reason}});
  return {{"accepted", report.accepted}, {"rejected", rejected}, {"warnings", report.warnings}};
}

LoadedRecords load_records(const std::string& path, RunManifest& manifest, std::ostream& err) {
  const std::string text = read_file(path);
  manifest.add_input("records", path, text);
  ParsedRecords parsed = parse_records(text);
  for (const auto& w : parsed.report.warnings) err << "warning: " << w << '\n';
  if (!parsed.report.rejected.empty())
    err << fmt::format("warning: {} of {} rows rejected (see ingest.json)\n", parsed.report.rejected.size(),
                       parsed.report.rejected.size() + parsed.report.accepted);
  return {std::move(parsed.records), ingest_json(parsed.report)};
}

json load_json_file(const std::string& path, const std::string& role, RunManifest& manifest) {
  const std::string text = read_file(path);
  manifest.add_input(role, path, text);
  return parse_json(text, fmt::format("{} '{}'", role, path));
}

// Canonical argument vector: input paths made absolute, --out and --threads
// left out so a rerun can supply its own.
class ArgLog {
 public:
  explicit ArgLog(std::string command) { args_.push_back(std::move(command)); }
  void path(std::string_view flag, const std::string& value) {
    if (!value.empty()) add(flag, absolute_string(value));
  }
  void add(std::string_view flag, const std::string& value) {
    args_.emplace_back(flag);
    args_.push_back(value);
  }
  void flag(std::string_view flag, bool on) {
    if (on) args_.emplace_back(flag);
  }
  const std::vector<std::string>& args() const { return args_; }

 private:
  std::vector<std::string> args_;
};

void write_reports(RunManifest& m, std::span<const PatentRecord> records, std::span<const ValueEstimate> values,
                   double deflator, const TextStyle& style) {
  const ExpiryShareTable expiry = expiry_share_table(records);
  m.write_output("expiry_shares.csv", to_csv(expiry));
  m.write_output("expiry_shares.txt", render_text(expiry));

  for (const MoneyField field : {MoneyField::r0, MoneyField::npv}) {
    const std::string stem = field == MoneyField::r0 ? "r0" : "npv";
    const auto tech = value_by_group(records, values, GroupKey::technology, field, deflator);
    const auto own = value_by_group(records, values, GroupKey::ownership, field, deflator);
    m.write_output(stem + "_by_technology.csv", to_csv(tech));
    m.write_output(stem + "_by_ownership.csv", to_csv(own));
    m.write_output(stem + "_by_group.txt", render_text(tech, own, style));
  }

  const QuantileTable quantiles = quantile_table(records, values, kValueQuantileLevels, deflator);
  m.write_output("npv_quantiles.csv", to_csv(quantiles));
  m.write_output("npv_quantiles.txt", render_text(quantiles, style));
  m.write_output("age_trend.csv", to_csv(age_trend(records, values)));
}

struct Options {
  std::string out;
  int threads = 0;
  std::string records;
  std::string schedule = "india";
  std::string ga_config;
  std::string bounds;
  std::string model_config;
  std::string estimate;
  std::string values;
  std::string params;
  std::string covariates;
  std::string manifest;
  std::string params_source = "point";
  std::string aggregate = "mean";
  std::uint64_t seed = 0;
  std::size_t draws = 10000;
  std::size_t ensemble_draws = 1000;
  std::size_t n = 0;
  bool ensemble = false;
  bool refine = false;
  double deflator = 1.0;
  double unit_divisor = 1e6;
  std::string unit_label = "$M";
};

void finish(RunManifest& m, const ArgLog& log, json config, std::optional<std::uint64_t> seed) {
  m.set_args(log.args());
  m.set_config(std::move(config));
  if (seed) m.set_seed(*seed);
  m.finish();
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err) {
  RunManifest m(o.out, "estimate");
  const LoadedRecords loaded = load_records(o.records, m, err);
  std::string schedule_ref;
  const FeeSchedule schedule = resolve_schedule(o.schedule, m, schedule_ref);
  GaConfig ga = o.ga_config.empty() ? GaConfig{} : ga_config_from_json(load_json_file(o.ga_config, "ga_config", m));
  ga.seed = o.seed;
  const ParamBounds bounds =
      o.bounds.empty() ? ParamBounds::defaults() : bounds_from_json(load_json_file(o.bounds, "bounds", m));
  const ModelConfig model = o.model_config.empty()
                                ? ModelConfig{}
                                : model_config_from_json(load_json_file(o.model_config, "model_config", m));

  std::string diagnostics = "start,generation,best_log_likelihood,median_log_likelihood\n";
  EstimateOptions opts;
  opts.threads = resolve_threads(o.threads);
  opts.observer = [&](std::size_t start, std::size_t generation, std::span<const ScoredParams> pop) {
    std::vector<double> ll;
    ll.reserve(pop.size());
    for (const auto& p : pop) ll.push_back(p.log_likelihood);
    std::sort(ll.begin(), ll.end());
    diagnostics += fmt::format("{},{},{},{}\n", start, generation, detail_format(ll.back()),
                               detail_format(quantile_sorted(ll, 0.5)));
  };
  EstimationResult result = estimate(loaded.records, schedule, model, ga, bounds, opts);
  if (o.refine) result = profile_refine(std::move(result), loaded.records, schedule, model, bounds);

  const EstimationDocument doc{std::move(result), ga, bounds, model, schedule_ref, loaded.records.size()};
  m.write_output("estimate.json", dump(to_json(doc)));
  m.write_output("diagnostics.csv", diagnostics);
  m.write_output("ingest.json", dump(loaded.ingest));

  ArgLog log("estimate");
  log.path("--records", o.records);
  log.add("--schedule", schedule_ref);
  log.path("--ga-config", o.ga_config);
  log.path("--bounds", o.bounds);
  log.path("--model-config", o.model_config);
  log.add("--seed", std::to_string(o.seed));
  log.flag("--refine", o.refine);
  finish(m, log,
         {{"ga", to_json(ga)}, {"bounds", to_json(bounds)}, {"model", to_json(model)}, {"schedule", schedule_ref}},
         o.seed);

  const EstimationResult& r = doc.result;
  out << fmt::format("estimated on {} records: log-likelihood {:.4f} at the elite median, best {:.4f}\n",
                     loaded.records.size(), r.point_log_likelihood, r.best.log_likelihood);
  const ParamVector point = to_vector(r.point_estimate);
  for (std::size_t i = 0; i < kParamCount; ++i)
    out << fmt::format("  {:<14} {:>10.4f}  ({:.4f}){}\n", param_name(i), point[i], r.std_errors[i],
                       r.boundary_hit[i] ? "  at bound" : "");
  if (r.non_monotone_evaluations > 0)
    err << fmt::format("warning: {} evaluations saw non-monotone thresholds\n", r.non_monotone_evaluations);
  return kSuccess;
}

// Shared by `simulate` (value table only) and `value` (table plus reports).
int cmd_simulate(const Options& o, bool with_reports, std::ostream& out, std::ostream& err) {
  const std::string command = with_reports ? "value" : "simulate";
  RunManifest m(o.out, command);
  const LoadedRecords loaded = load_records(o.records, m, err);
  std::string schedule_ref;
  const FeeSchedule schedule = resolve_schedule(o.schedule, m, schedule_ref);
  const EstimationDocument doc = estimation_from_json(load_json_file(o.estimate, "estimate", m));

  ModelParams params = doc.result.point_estimate;
  if (o.params_source == "best") {
    params = doc.result.best.params;
  } else if (o.params_source == "refined") {
    if (!doc.result.refined) throw ValidationError("estimate", {"no refined parameters (estimate with --refine)"});
    params = doc.result.refined->params;
  }

  ValueRunOptions opts;
  opts.draws = o.draws;
  opts.seed = o.seed;
  opts.threads = resolve_threads(o.threads);
  opts.ensemble_draws = o.ensemble_draws;
  opts.aggregate = o.aggregate == "median" ? EnsembleAggregate::median : EnsembleAggregate::mean;
  if (o.ensemble) {
    if (doc.result.elite.empty()) throw ValidationError("estimate", {"--ensemble needs an elite set in the estimate"});
    for (const auto& s : doc.result.elite) opts.elite.push_back(s.params);
  }
  if (o.draws < 1) throw ValidationError("options", {"--draws must be at least 1"});

  const std::vector<ValueEstimate> values = simulate_values(params, loaded.records, schedule, doc.model, opts);
  m.write_output("values.csv", value_table_csv(values));
  m.write_output("ingest.json", dump(loaded.ingest));
  if (with_reports) write_reports(m, loaded.records, values, o.deflator, {o.unit_divisor, o.unit_label});

  ArgLog log(command);
  log.path("--records", o.records);
  log.add("--schedule", schedule_ref);
  log.path("--estimate", o.estimate);
  log.add("--params-source", o.params_source);
  log.add("--draws", std::to_string(o.draws));
  log.add("--seed", std::to_string(o.seed));
  log.flag("--ensemble", o.ensemble);
  log.add("--ensemble-draws", std::to_string(o.ensemble_draws));
  log.add("--aggregate", o.aggregate);
  if (with_reports) {
    log.add("--deflator", detail_format(o.deflator));
    log.add("--unit-divisor", detail_format(o.unit_divisor));
    log.add("--unit-label", o.unit_label);
  }
  finish(m, log,
         {{"params", to_json(params)},
          {"params_source", o.params_source},
          {"model", to_json(doc.model)},
          {"schedule", schedule_ref},
          {"draws", o.draws},
          {"ensemble", o.ensemble},
          {"ensemble_draws", o.ensemble_draws},
          {"aggregate", o.aggregate}},
         o.seed);

  const auto unreliable = std::count_if(values.begin(), values.end(), [](const auto& v) { return !v.mc_reliable; });
  out << fmt::format("valued {} patents with {} draws each{}\n", values.size(), o.draws,
                     o.ensemble ? fmt::format(", ensemble over {} elite vectors", opts.elite.size()) : "");
  if (unreliable > 0)
    err << fmt::format("warning: {} patents have fewer than {} draws; MC standard errors are unreliable\n",
                       unreliable, kMinReliableDraws);
  return kSuccess;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  RunManifest m(o.out, "report");
  const LoadedRecords loaded = load_records(o.records, m, err);
  const std::string text = read_file(o.values);
  m.add_input("values", o.values, text);
  const std::vector<ValueEstimate> values = parse_value_table(text);
  write_reports(m, loaded.records, values, o.deflator, {o.unit_divisor, o.unit_label});

  ArgLog log("report");
  log.path("--records", o.records);
  log.path("--values", o.values);
  log.add("--deflator", detail_format(o.deflator));
  log.add("--unit-divisor", detail_format(o.unit_divisor));
  log.add("--unit-label", o.unit_label);
  finish(m, log, {{"deflator", o.deflator}, {"unit_divisor", o.unit_divisor}, {"unit_label", o.unit_label}},
         std::nullopt);
  out << fmt::format("reports for {} patents written to {}\n", loaded.records.size(), o.out);
  return kSuccess;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream&) {
  RunManifest m(o.out, "synth");
  const ModelParams params = params_from_json(load_json_file(o.params, "params", m));
  std::string schedule_ref;
  const FeeSchedule schedule = resolve_schedule(o.schedule, m, schedule_ref);
  const CovariateSpec spec = o.covariates.empty()
                                 ? CovariateSpec::indian_cohort_defaults()
                                 : covariate_spec_from_json(load_json_file(o.covariates, "covariates", m));
  const ModelConfig model = o.model_config.empty()
                                ? ModelConfig{}
                                : model_config_from_json(load_json_file(o.model_config, "model_config", m));
  if (o.n < 1) throw ValidationError("options", {"--n must be at least 1"});

  const std::vector<PatentRecord> records = generate_synthetic(params, o.n, schedule, model, spec, o.seed);
  m.write_output("records.csv", serialize_records(records));

  ArgLog log("synth");
  log.path("--params", o.params);
  log.add("--n", std::to_string(o.n));
  log.add("--schedule", schedule_ref);
  log.path("--covariates", o.covariates);
  log.path("--model-config", o.model_config);
  log.add("--seed", std::to_string(o.seed));
  finish(m, log,
         {{"params", to_json(params)}, {"covariates", to_json(spec)}, {"model", to_json(model)}, {"schedule", schedule_ref}},
         o.seed);
  out << fmt::format("wrote {} synthetic records\n", records.size());
  return kSuccess;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  RunManifest m(o.out, "stats");
  const LoadedRecords loaded = load_records(o.records, m, err);
  const DescriptiveStats stats = descriptive_stats(loaded.records);
  m.write_output("descriptive.csv", descriptive_stats_csv(stats));
  m.write_output("expiry_shares.csv", to_csv(expiry_share_table(loaded.records)));
  m.write_output("expiry_shares.txt", render_text(expiry_share_table(loaded.records)));
  m.write_output("ingest.json", dump(loaded.ingest));

  ArgLog log("stats");
  log.path("--records", o.records);
  finish(m, log, json::object(), std::nullopt);
  out << fmt::format("{} patents, mean renewal age {:.3f}\n", loaded.records.size(), stats.mean_renewal_age);
  return kSuccess;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Re-runs a manifest's command into a new output directory after checking
// that every recorded input still has the recorded digest.
int cmd_rerun(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(o.manifest);
  const json manifest = parse_json(text, "manifest");
  std::vector<std::string> problems;
  std::vector<std::string> args;
  try {
    args = manifest.at("args").get<std::vector<std::string>>();
    for (const auto& [role, entry] : manifest.at("inputs").items()) {
      const std::string path = entry.at("path").get<std::string>();
      std::string current;
      try {
        current = sha256_hex(read_file(path));
      } catch (const InputError&) {
        problems.push_back(fmt::format("input '{}' ({}) is no longer readable", role, path));
        continue;
      }
      if (current != entry.at("sha256").get<std::string>())
        problems.push_back(fmt::format("input '{}' ({}) changed since the recorded run", role, path));
    }
  } catch (const json::exception& e) {
    throw ValidationError("manifest", {fmt::format("malformed manifest: {}", e.what())});
  }
  if (args.empty() || args.front() == "rerun") throw ValidationError("manifest", {"manifest names no rerunnable command"});
  if (!problems.empty()) throw ValidationError("manifest", std::move(problems));
  args.push_back("--out");
  args.push_back(o.out);
  if (o.threads > 0) {
    args.push_back("--threads");
    args.push_back(std::to_string(o.threads));
  }
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patent renewal value model: estimation, valuation and reports", "patent-rent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PATENT_RENT_VERSION);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory (created if missing)")->required();
    sub->add_option("--threads", o.threads, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1, 4096));
  };
  const auto seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "Random seed")->required(); };
  const auto records = [&](CLI::App* sub) {
    sub->add_option("--records", o.records, "Patent records CSV")->required();
  };
  const auto schedule = [&](CLI::App* sub) {
    sub->add_option("--schedule", o.schedule, "Fee schedule: india, china, us or a schedule file")->capture_default_str();
  };
  const auto reports = [&](CLI::App* sub) {
    sub->add_option("--deflator", o.deflator, "Multiplier applied to money columns")->capture_default_str();
    sub->add_option("--unit-divisor", o.unit_divisor, "Money divisor for text tables")->capture_default_str();
    sub->add_option("--unit-label", o.unit_label, "Money unit label for text tables")->capture_default_str();
  };
  const auto valuation = [&](CLI::App* sub) {
    sub->add_option("--estimate", o.estimate, "estimate.json from the estimate command")->required();
    sub->add_option("--draws", o.draws, "Monte Carlo draws per patent")->capture_default_str();
    sub->add_flag("--ensemble", o.ensemble, "Propagate parameter uncertainty over the elite set");
    sub->add_option("--ensemble-draws", o.ensemble_draws, "Draws per elite vector")->capture_default_str();
    sub->add_option("--aggregate", o.aggregate, "Ensemble point value: mean or median")->capture_default_str()
        ->check(CLI::IsMember({"mean", "median"}));
    sub->add_option("--params-source", o.params_source, "Parameters to value with: point, best or refined")->capture_default_str()
        ->check(CLI::IsMember({"point", "best", "refined"}));
  };

  CLI::App* est = app.add_subcommand("estimate", "Maximum-likelihood estimation by genetic algorithm");
  common(est), seed(est), records(est), schedule(est);
  est->add_option("--ga-config", o.ga_config, "GA configuration JSON");
  est->add_option("--bounds", o.bounds, "Parameter bounds JSON");
  est->add_option("--model-config", o.model_config, "Model configuration JSON");
  est->add_flag("--refine", o.refine, "Polish the best individual with a coordinate search");

  CLI::App* sim = app.add_subcommand("simulate", "Per-patent value table");
  common(sim), seed(sim), records(sim), schedule(sim), valuation(sim);

  CLI::App* val = app.add_subcommand("value", "Per-patent values plus report tables");
  common(val), seed(val), records(val), schedule(val), valuation(val), reports(val);

  CLI::App* rep = app.add_subcommand("report", "Report tables from an existing value table");
  common(rep), records(rep), reports(rep);
  rep->add_option("--values", o.values, "values.csv from simulate or value")->required();

  CLI::App* syn = app.add_subcommand("synth", "Synthetic cohort from known parameters");
  common(syn), seed(syn), schedule(syn);
  syn->add_option("--params", o.params, "Model parameters JSON")->required();
  syn->add_option("--n", o.n, "Number of patents")->required();
  syn->add_option("--covariates", o.covariates, "Covariate specification JSON");
  syn->add_option("--model-config", o.model_config, "Model configuration JSON");

  CLI::App* sts = app.add_subcommand("stats", "Descriptive statistics of a records file");
  common(sts), records(sts);

  CLI::App* rer = app.add_subcommand("rerun", "Repeat a recorded run into a new directory");
  rer->add_option("--manifest", o.manifest, "manifest.json of the run to repeat")->required();
  rer->add_option("--out", o.out, "Output directory")->required();
  rer->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 4096));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << PATENT_RENT_VERSION << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  if (est->parsed()) return cmd_estimate(o, out, err);
  if (sim->parsed()) return cmd_simulate(o, false, out, err);
  if (val->parsed()) return cmd_simulate(o, true, out, err);
  if (rep->parsed()) return cmd_report(o, out, err);
  if (syn->parsed()) return cmd_synth(o, out, err);
  if (sts->parsed()) return cmd_stats(o, out, err);
  return cmd_rerun(o, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << '\n';
    return kComputationError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace patent_rent::cli
