#include "patent_rent/random.hpp"

#include <cmath>

#include "patent_rent/normal.hpp"

namespace patent_rent {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t id : path) {
    state = out ^ (id + 0x632BE59BD9B4E019ULL);
    out = splitmix64(state);
  }
  return out;
}

std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

double Rng::uniform() noexcept {
  // (k + 0.5) / 2^53 never touches 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
  if (!(hi > lo)) return lo;
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double x = lo + u * (hi - lo);
  return x > hi ? hi : x;
}

double Rng::normal() noexcept { return normal_quantile(uniform()); }

std::uint64_t Rng::poisson(double mean) noexcept {
  if (!(mean > 0.0)) return 0;
  if (mean > 500.0) {
    const double x = std::round(mean + std::sqrt(mean) * normal());
    return x < 0.0 ? 0 : static_cast<std::uint64_t>(x);
  }
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf && k < 100000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && cdf < u) break;
  }
  return k;
}

double Rng::gamma(double shape) noexcept {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t Rng::negative_binomial(double mean, double variance) noexcept {
  if (!(mean > 0.0)) return 0;
  if (!(variance > mean)) return poisson(mean);
  // Gamma-Poisson mixture: lambda ~ Gamma(k, mean/k), k = mean^2 / (var - mean).
  const double shape = mean * mean / (variance - mean);
  const double lambda = gamma(shape) * (mean / shape);
  return poisson(lambda);
}

std::size_t Rng::index(std::size_t n) noexcept {
  if (n <= 1) return 0;
  auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return k >= n ? n - 1 : k;
}

}  // namespace patent_rent
