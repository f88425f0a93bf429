#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "patent_rent/fee_schedule.hpp"
#include "patent_rent/patent_record.hpp"
#include "patent_rent/renewal_model.hpp"

namespace patent_rent {

/// Flat parameter vector used by the optimizer: sigma, d, then the nine
/// coefficients in `Coef` order.
inline constexpr std::size_t kParamCount = 2 + kCoefCount;
using ParamVector = std::array<double, kParamCount>;

inline constexpr std::size_t kSigmaIndex = 0;
inline constexpr std::size_t kDepreciationIndex = 1;
constexpr std::size_t param_index(Coef c) noexcept { return 2 + static_cast<std::size_t>(c); }

std::string_view param_name(std::size_t index) noexcept;
ParamVector to_vector(const ModelParams& params) noexcept;
ModelParams from_vector(const ParamVector& v) noexcept;

/// Genome coordinates the operators act on. `natural` evolves (sigma, d,
/// beta) directly; `standardized` evolves (log sigma, d, beta / sigma) with the
/// intercept measured from the first fee-bearing cutpoint, which straightens
/// the sigma-intercept-d ridge of the likelihood. Clipping and reporting are
/// always in natural coordinates.
enum class GaEncodingKind { natural, standardized };

/// Genetic algorithm settings. Operator choices (tournament selection, blend
/// crossover, Gaussian mutation with geometric annealing, 1% elitism) are
/// engineering defaults and are echoed with every result.
struct GaConfig {
  std::size_t population_size = 2000;
  std::size_t generations = 20;
  std::size_t starts = 5;
  std::size_t elite_size = 200;
  std::size_t tournament_size = 16;
  double crossover_rate = 0.9;
  double mutation_rate = 0.10;
  /// Mutation standard deviation as a fraction of each gene's initial spread.
  double mutation_scale = 0.05;
  /// Mutation scale in the last generation relative to the first.
  double mutation_final_fraction = 0.02;
  /// BLX-alpha extension of the parent interval.
  double blend_alpha = 0.5;
  /// Share of each generation copied unchanged (at least one individual).
  double elitism_fraction = 0.01;
  GaEncodingKind encoding = GaEncodingKind::standardized;
  std::uint64_t seed = 0;

  /// Throws ConfigurationError on zero counts, rates outside [0, 1] or
  /// elite_size > population_size.
  void validate() const;

  friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Closed search box. Strict sign constraints become closed intervals offset
/// from zero by kInteriorOffset.
struct ParamBounds {
  static constexpr double kInteriorOffset = 1e-6;

  std::array<Interval, kParamCount> box{};

  /// sigma in (0, sigma_max], d in [0.1, 0.5], grant_lag <= 0, tech_scope,
  /// family_size and inventor_size >= 0, everything else in [-beta_max, beta_max].
  static ParamBounds defaults(double sigma_max = 10.0, double beta_max = 10.0, double d_lo = 0.1,
                              double d_hi = 0.5);
  /// Degenerate box holding exactly one point.
  static ParamBounds point(const ModelParams& params);

  /// Throws ConfigurationError for empty or non-finite intervals, a box that
  /// admits sigma <= 0 or d <= 0, or one that violates the sign constraints.
  void validate() const;
  ParamVector clip(ParamVector v) const noexcept;
  bool contains(const ParamVector& v) const noexcept;

  friend bool operator==(const ParamBounds&, const ParamBounds&) = default;
};

struct ScoredParams {
  ModelParams params;
  double log_likelihood = 0.0;
};

struct StartDiagnostics {
  std::uint64_t seed = 0;
  /// Best log-likelihood in the initial population and after each generation.
  std::vector<double> best_trajectory;
};

struct EstimationResult {
  /// Pooled top elite_size individuals, best first.
  std::vector<ScoredParams> elite;
  /// Componentwise median of the elite set.
  ModelParams point_estimate;
  double point_log_likelihood = 0.0;
  /// Sample standard deviation over the elite ("elite dispersion", not
  /// asymptotic standard errors).
  ParamVector std_errors{};
  ScoredParams best;
  /// Local polish of `best` from profile_refine, when requested.
  std::optional<ScoredParams> refined;
  std::vector<StartDiagnostics> starts;
  /// Median within 1% of a box edge.
  std::array<bool, kParamCount> boundary_hit{};
  std::size_t non_monotone_evaluations = 0;
};

/// Called once per generation (0 = initial population) with the evaluated
/// population of one start. Runs on the calling thread.
using GenerationObserver =
    std::function<void(std::size_t start, std::size_t generation, std::span<const ScoredParams>)>;

struct EstimateOptions {
  int threads = 1;
  GenerationObserver observer;
};

/// Fitness function over parameter vectors; must be safe to call concurrently.
using Objective = std::function<double(const ParamVector&)>;

/// Map between parameter vectors and genomes. decode need not land in the
/// box; its output is clipped before evaluation.
struct GaEncoding {
  std::function<ParamVector(const ParamVector&)> encode;
  std::function<ParamVector(const ParamVector&)> decode;

  static GaEncoding identity();
};

/// The encoding estimate() uses for `kind`.
GaEncoding make_encoding(GaEncodingKind kind, const FeeSchedule& schedule, const ModelConfig& config,
                         const ParamBounds& bounds);

/// The generic GA core behind estimate(). Deterministic in (config, bounds)
/// for any thread count. `config.encoding` is ignored here; the genome map is
/// `encoding`.
EstimationResult run_genetic_search(const Objective& objective, const GaConfig& config,
                                    const ParamBounds& bounds, const EstimateOptions& options = {},
                                    const GaEncoding& encoding = GaEncoding::identity());

/// Maximum-likelihood estimation of (sigma, d, beta) by multi-start GA.
///
/// Requires at least 50 records spanning at least two distinct expiry ages
/// (DegenerateDataError otherwise).
EstimationResult estimate(std::span<const PatentRecord> records, const FeeSchedule& schedule,
                          const ModelConfig& config, const GaConfig& ga, const ParamBounds& bounds,
                          const EstimateOptions& options = {});

struct RefineOptions {
  double tolerance = 1e-6;
  int max_sweeps = 50;
};

/// Coordinate-wise golden-section ascent inside `bounds`. Stops when a sweep
/// improves the objective by less than `tolerance` or after max_sweeps. Only
/// accepts moves that improve the objective.
ParamVector refine_coordinatewise(const Objective& objective, ParamVector start,
                                  const ParamBounds& bounds, const RefineOptions& options = {});

/// Polishes `result.best` and stores it in `refined`; the elite set, median
/// and dispersion are left as they are.
EstimationResult profile_refine(EstimationResult result, std::span<const PatentRecord> records,
                                const FeeSchedule& schedule, const ModelConfig& config,
                                const ParamBounds& bounds, const RefineOptions& options = {});

}  // namespace patent_rent
