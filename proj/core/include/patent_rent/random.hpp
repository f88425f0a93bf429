#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace patent_rent {

/// One step of the splitmix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent stream seed from a base seed and a path of stream
/// identifiers (start index, generation, individual, ...). Results depend only
/// on the arguments, never on evaluation order, which is what makes parallel
/// work reproducible for any worker count.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// FNV-1a over the bytes of a label; used to key per-patent streams by id.
std::uint64_t hash_label(std::string_view label) noexcept;

/// Thin wrapper around mt19937_64 with distribution code that is identical
/// across standard libraries (the std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) noexcept;
  /// Standard normal by inversion.
  double normal() noexcept;
  /// Poisson(mean) by sequential search of the CDF.
  std::uint64_t poisson(double mean) noexcept;
  /// Negative binomial with the given mean and variance (variance > mean),
  /// drawn as a gamma-Poisson mixture.
  std::uint64_t negative_binomial(double mean, double variance) noexcept;
  /// Gamma(shape, scale=1) via Marsaglia-Tsang.
  double gamma(double shape) noexcept;
  /// Index in [0, n).
  std::size_t index(std::size_t n) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace patent_rent
