#include "patent_rent/ga_estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <set>

#include "patent_rent/errors.hpp"
#include "patent_rent/likelihood.hpp"
#include "patent_rent/parallel.hpp"
#include "patent_rent/random.hpp"

namespace patent_rent {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Individual {
  ParamVector genes{};  ///< encoded
  ParamVector point{};  ///< decoded and inside the box
  double fitness = kNegInf;
};

double sanitize(double f) noexcept { return std::isnan(f) ? kNegInf : f; }

// Higher fitness wins; ties go to the lower index so ordering is total.
bool fitter(const std::vector<Individual>& pop, std::size_t a, std::size_t b) noexcept {
  if (pop[a].fitness != pop[b].fitness) return pop[a].fitness > pop[b].fitness;
  return a < b;
}

std::size_t tournament(const std::vector<Individual>& pop, std::size_t size, Rng& rng) {
  std::size_t best = rng.index(pop.size());
  for (std::size_t k = 1; k < size; ++k) {
    const std::size_t challenger = rng.index(pop.size());
    if (fitter(pop, challenger, best)) best = challenger;
  }
  return best;
}

std::vector<ScoredParams> to_scored(const std::vector<Individual>& pop) {
  std::vector<ScoredParams> out;
  out.reserve(pop.size());
  for (const auto& ind : pop) out.push_back({from_vector(ind.point), ind.fitness});
  return out;
}

double quantile_of_sorted(const std::vector<double>& v, double p) {
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Sample standard deviation around a shift of the first value, so identical
// inputs give exactly zero.
double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double k = v.front();
  double s = 0.0, ss = 0.0;
  for (double x : v) {
    s += x - k;
    ss += (x - k) * (x - k);
  }
  const double n = static_cast<double>(v.size());
  const double var = (ss - s * s / n) / (n - 1.0);
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

std::string_view param_name(std::size_t index) noexcept {
  if (index == kSigmaIndex) return "sigma";
  if (index == kDepreciationIndex) return "d";
  return coef_name(index - 2);
}

ParamVector to_vector(const ModelParams& params) noexcept {
  ParamVector v{};
  v[kSigmaIndex] = params.sigma;
  v[kDepreciationIndex] = params.d;
  std::copy(params.beta.begin(), params.beta.end(), v.begin() + 2);
  return v;
}

ModelParams from_vector(const ParamVector& v) noexcept {
  ModelParams p;
  p.sigma = v[kSigmaIndex];
  p.d = v[kDepreciationIndex];
  std::copy(v.begin() + 2, v.end(), p.beta.begin());
  return p;
}

void GaConfig::validate() const {
  std::vector<std::string> v;
  if (population_size < 1) v.emplace_back("population_size must be >= 1");
  if (generations < 1) v.emplace_back("generations must be >= 1");
  if (starts < 1) v.emplace_back("starts must be >= 1");
  if (elite_size < 1) v.emplace_back("elite_size must be >= 1");
  if (tournament_size < 1) v.emplace_back("tournament_size must be >= 1");
  if (elite_size > population_size * starts)
    v.push_back(fmt::format("elite_size {} exceeds the pooled population {}", elite_size,
                            population_size * starts));
  if (elite_size > population_size)
    v.push_back(fmt::format("elite_size {} exceeds population_size {}", elite_size, population_size));
  const auto rate = [&](double r, std::string_view what) {
    if (!(r >= 0.0 && r <= 1.0)) v.push_back(fmt::format("{} = {} must lie in [0, 1]", what, r));
  };
  rate(crossover_rate, "crossover_rate");
  rate(mutation_rate, "mutation_rate");
  rate(elitism_fraction, "elitism_fraction");
  if (!(mutation_scale >= 0.0)) v.emplace_back("mutation_scale must be >= 0");
  if (!(mutation_final_fraction > 0.0 && mutation_final_fraction <= 1.0))
    v.emplace_back("mutation_final_fraction must lie in (0, 1]");
  if (!(blend_alpha >= 0.0)) v.emplace_back("blend_alpha must be >= 0");
  if (!v.empty()) throw ConfigurationError(ValidationError("invalid GA configuration", std::move(v)).what());
}

ParamBounds ParamBounds::defaults(double sigma_max, double beta_max, double d_lo, double d_hi) {
  ParamBounds b;
  b.box[kSigmaIndex] = {kInteriorOffset, sigma_max};
  b.box[kDepreciationIndex] = {d_lo, d_hi};
  for (std::size_t c = 0; c < kCoefCount; ++c) b.box[2 + c] = {-beta_max, beta_max};
  b.box[param_index(Coef::family_size)] = {kInteriorOffset, beta_max};
  b.box[param_index(Coef::inventor_size)] = {kInteriorOffset, beta_max};
  b.box[param_index(Coef::tech_scope)] = {kInteriorOffset, beta_max};
  b.box[param_index(Coef::grant_lag)] = {-beta_max, -kInteriorOffset};
  return b;
}

ParamBounds ParamBounds::point(const ModelParams& params) {
  ParamBounds b;
  const ParamVector v = to_vector(params);
  for (std::size_t i = 0; i < kParamCount; ++i) b.box[i] = {v[i], v[i]};
  return b;
}

void ParamBounds::validate() const {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const auto& iv = box[i];
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      v.push_back(fmt::format("{}: bounds must be finite", param_name(i)));
    else if (iv.lo > iv.hi)
      v.push_back(fmt::format("{}: empty interval [{}, {}]", param_name(i), iv.lo, iv.hi));
  }
  if (!(box[kSigmaIndex].lo > 0.0)) v.emplace_back("sigma: lower bound must be > 0");
  if (!(box[kDepreciationIndex].lo > 0.0)) v.emplace_back("d: lower bound must be > 0");
  if (box[param_index(Coef::grant_lag)].hi > 0.0) v.emplace_back("grant_lag: upper bound must be <= 0");
  for (Coef c : {Coef::family_size, Coef::inventor_size, Coef::tech_scope}) {
    if (box[param_index(c)].lo < 0.0)
      v.push_back(fmt::format("{}: lower bound must be >= 0", param_name(param_index(c))));
  }
  if (!v.empty()) throw ConfigurationError(ValidationError("infeasible parameter bounds", v).what());
}

ParamVector ParamBounds::clip(ParamVector v) const noexcept {
  for (std::size_t i = 0; i < kParamCount; ++i) v[i] = std::clamp(v[i], box[i].lo, box[i].hi);
  return v;
}

bool ParamBounds::contains(const ParamVector& v) const noexcept {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (!(v[i] >= box[i].lo && v[i] <= box[i].hi)) return false;
  }
  return true;
}

GaEncoding GaEncoding::identity() {
  return {[](const ParamVector& v) { return v; }, [](const ParamVector& g) { return g; }};
}

GaEncoding make_encoding(GaEncodingKind kind, const FeeSchedule& schedule, const ModelConfig& config,
                         const ParamBounds& bounds) {
  const auto first_fee = schedule.first_fee_age();
  if (kind == GaEncodingKind::natural || !first_fee) return GaEncoding::identity();
  const int ref_age = std::max(*first_fee, config.min_age);
  const Interval d_box = bounds.box[kDepreciationIndex];
  const double log_sigma_lo = std::log(bounds.box[kSigmaIndex].lo);
  const double log_sigma_hi = std::log(bounds.box[kSigmaIndex].hi);
  // Cutpoint at the reference age; d is clamped so decode never leaves d > 0.
  const auto anchor = [=](double d) {
    return threshold(schedule, std::clamp(d, d_box.lo, d_box.hi), config, ref_age);
  };
  const std::size_t b0 = param_index(Coef::intercept);
  GaEncoding e;
  e.encode = [=](const ParamVector& v) {
    ParamVector g = v;
    const double sigma = v[kSigmaIndex];
    g[kSigmaIndex] = std::log(sigma);
    for (std::size_t k = 2; k < kParamCount; ++k) g[k] = v[k] / sigma;
    g[b0] = (v[b0] - anchor(v[kDepreciationIndex])) / sigma;
    return g;
  };
  e.decode = [=](const ParamVector& g) {
    ParamVector v = g;
    const double sigma = std::exp(std::clamp(g[kSigmaIndex], log_sigma_lo, log_sigma_hi));
    v[kSigmaIndex] = sigma;
    for (std::size_t k = 2; k < kParamCount; ++k) v[k] = sigma * g[k];
    v[b0] = sigma * g[b0] + anchor(g[kDepreciationIndex]);
    return v;
  };
  return e;
}

EstimationResult run_genetic_search(const Objective& objective, const GaConfig& cfg,
                                    const ParamBounds& bounds, const EstimateOptions& options,
                                    const GaEncoding& encoding) {
  cfg.validate();
  bounds.validate();

  const std::size_t pop_size = cfg.population_size;
  const std::size_t carry = std::min(
      pop_size, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.elitism_fraction *
                                                                             static_cast<double>(pop_size)))));
  // Genome -> clipped parameters -> genome, so stored genes always decode inside the box.
  const auto settle = [&](Individual& ind, const ParamVector& genome) {
    ind.point = bounds.clip(encoding.decode(genome));
    ind.genes = encoding.encode(ind.point);
    ind.fitness = sanitize(objective(ind.point));
  };

  EstimationResult result;
  std::vector<Individual> pooled;
  pooled.reserve(pop_size * cfg.starts);

  for (std::size_t s = 0; s < cfg.starts; ++s) {
    const std::uint64_t start_seed = derive_seed(cfg.seed, {s});
    StartDiagnostics diag;
    diag.seed = start_seed;

    std::vector<Individual> pop(pop_size);
    parallel_for(pop_size, options.threads, [&](std::size_t i) {
      Rng rng(derive_seed(start_seed, {0, i}));
      ParamVector v{};
      for (std::size_t k = 0; k < kParamCount; ++k) v[k] = rng.uniform(bounds.box[k].lo, bounds.box[k].hi);
      settle(pop[i], encoding.encode(v));
    });

    // Mutation widths in genome coordinates: twice the interquartile range of
    // the initial population, about the box width under the identity encoding.
    ParamVector width{};
    for (std::size_t k = 0; k < kParamCount; ++k) {
      std::vector<double> column(pop_size);
      for (std::size_t i = 0; i < pop_size; ++i) column[i] = pop[i].genes[k];
      std::sort(column.begin(), column.end());
      width[k] = 2.0 * (quantile_of_sorted(column, 0.75) - quantile_of_sorted(column, 0.25));
    }

    const auto record = [&](std::size_t generation) {
      double best = kNegInf;
      for (const auto& ind : pop) best = std::max(best, ind.fitness);
      diag.best_trajectory.push_back(best);
      if (options.observer) {
        const auto scored = to_scored(pop);
        options.observer(s, generation, scored);
      }
    };
    record(0);

    for (std::size_t g = 1; g <= cfg.generations; ++g) {
      std::vector<std::size_t> order(pop_size);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return fitter(pop, a, b); });

      const double progress =
          cfg.generations > 1 ? static_cast<double>(g - 1) / static_cast<double>(cfg.generations - 1) : 0.0;
      const double scale = cfg.mutation_scale * std::pow(cfg.mutation_final_fraction, progress);

      std::vector<Individual> next(pop_size);
      for (std::size_t k = 0; k < carry; ++k) next[k] = pop[order[k]];

      parallel_for(pop_size - carry, options.threads, [&](std::size_t j) {
        const std::size_t slot = carry + j;
        Rng rng(derive_seed(start_seed, {g, slot}));
        const auto& p1 = pop[tournament(pop, cfg.tournament_size, rng)].genes;
        const auto& p2 = pop[tournament(pop, cfg.tournament_size, rng)].genes;
        ParamVector child = p1;
        if (rng.bernoulli(cfg.crossover_rate)) {
          for (std::size_t k = 0; k < kParamCount; ++k) {
            const double u = rng.uniform(-cfg.blend_alpha, 1.0 + cfg.blend_alpha);
            child[k] = p1[k] + u * (p2[k] - p1[k]);
          }
        }
        for (std::size_t k = 0; k < kParamCount; ++k) {
          if (rng.bernoulli(cfg.mutation_rate)) child[k] += scale * width[k] * rng.normal();
        }
        settle(next[slot], child);
      });
      pop = std::move(next);
      record(g);
    }

    pooled.insert(pooled.end(), pop.begin(), pop.end());
    result.starts.push_back(std::move(diag));
  }

  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pooled[a].fitness > pooled[b].fitness;
  });

  const std::size_t n_elite = std::min(cfg.elite_size, pooled.size());
  result.elite.reserve(n_elite);
  for (std::size_t k = 0; k < n_elite; ++k) {
    const auto& ind = pooled[order[k]];
    result.elite.push_back({from_vector(ind.point), ind.fitness});
  }
  result.best = result.elite.front();

  ParamVector median{};
  for (std::size_t i = 0; i < kParamCount; ++i) {
    std::vector<double> column;
    column.reserve(n_elite);
    for (std::size_t k = 0; k < n_elite; ++k) column.push_back(pooled[order[k]].point[i]);
    median[i] = median_of(column);
    result.std_errors[i] = sample_sd(column);
    const auto& iv = bounds.box[i];
    const double margin = 0.01 * iv.width();
    result.boundary_hit[i] = iv.width() > 0.0 && (median[i] - iv.lo <= margin || iv.hi - median[i] <= margin);
  }
  result.point_estimate = from_vector(median);
  result.point_log_likelihood = sanitize(objective(median));
  return result;
}

EstimationResult estimate(std::span<const PatentRecord> records, const FeeSchedule& schedule,
                          const ModelConfig& config, const GaConfig& ga, const ParamBounds& bounds,
                          const EstimateOptions& options) {
  config.validate();
  ga.validate();
  bounds.validate();
  if (records.size() < 50)
    throw DegenerateDataError(
        fmt::format("estimation needs at least 50 records, got {}", records.size()));
  std::set<int> ages;
  for (const auto& r : records) ages.insert(r.expiry_age);
  if (ages.size() < 2)
    throw DegenerateDataError(fmt::format(
        "all {} records share expiry age {}; the likelihood is flat in sigma", records.size(),
        *ages.begin()));

  const LikelihoodEvaluator evaluator(records, schedule, config);
  std::atomic<std::size_t> non_monotone{0};
  const Objective objective = [&](const ParamVector& v) {
    const LogLikelihood ll = evaluator(from_vector(v));
    if (ll.non_monotone_warning) non_monotone.fetch_add(1, std::memory_order_relaxed);
    return ll.value;
  };
  EstimationResult result =
      run_genetic_search(objective, ga, bounds, options, make_encoding(ga.encoding, schedule, config, bounds));
  result.non_monotone_evaluations = non_monotone.load();
  return result;
}

ParamVector refine_coordinatewise(const Objective& objective, ParamVector start,
                                  const ParamBounds& bounds, const RefineOptions& options) {
  constexpr double kInvPhi = 0.61803398874989484820;
  ParamVector x = bounds.clip(start);
  double fx = sanitize(objective(x));

  ParamVector step{};
  for (std::size_t j = 0; j < kParamCount; ++j) step[j] = 0.1 * bounds.box[j].width();

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double before = fx;
    for (std::size_t j = 0; j < kParamCount; ++j) {
      const auto& iv = bounds.box[j];
      if (!(iv.width() > 0.0)) continue;
      const double f_prev = fx;
      double a = std::max(iv.lo, x[j] - step[j]);
      double b = std::min(iv.hi, x[j] + step[j]);

      ParamVector probe = x;
      const auto eval = [&](double t) {
        probe[j] = t;
        return sanitize(objective(probe));
      };
      double best_t = x[j];
      double best_f = fx;
      const auto consider = [&](double t, double f) {
        if (f > best_f) {
          best_f = f;
          best_t = t;
        }
      };
      consider(a, eval(a));
      consider(b, eval(b));
      double c = b - kInvPhi * (b - a);
      double d = a + kInvPhi * (b - a);
      double fc = eval(c), fd = eval(d);
      consider(c, fc);
      consider(d, fd);
      const double tol = 1e-10 * std::max(1.0, std::fabs(x[j]));
      for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kInvPhi * (b - a);
          fc = eval(c);
          consider(c, fc);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kInvPhi * (b - a);
          fd = eval(d);
          consider(d, fd);
        }
      }
      const double move = best_t - x[j];
      const bool moved = best_f > f_prev;
      if (moved) {
        x[j] = best_t;
        fx = best_f;
      }
      step[j] = std::clamp(moved ? 4.0 * std::fabs(move) : 0.5 * step[j], 1e-9 * iv.width(),
                           0.25 * iv.width());
    }
    if (fx - before < options.tolerance) break;
  }
  return x;
}

EstimationResult profile_refine(EstimationResult result, std::span<const PatentRecord> records,
                                const FeeSchedule& schedule, const ModelConfig& config,
                                const ParamBounds& bounds, const RefineOptions& options) {
  bounds.validate();
  const LikelihoodEvaluator evaluator(records, schedule, config);
  const Objective objective = [&](const ParamVector& v) { return evaluator(from_vector(v)).value; };
  const ParamVector start = to_vector(result.best.params);
  const ParamVector refined = refine_coordinatewise(objective, start, bounds, options);
  double ll = objective(refined);
  ScoredParams out{from_vector(refined), ll};
  if (!(ll >= result.best.log_likelihood)) out = result.best;
  result.refined = out;
  return result;
}

}  // namespace patent_rent
