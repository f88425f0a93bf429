#include "oracles.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace oracle {

double z_quadrature(double d, double s, double t) {
  const auto f = [&](double tau) { return std::exp(-d * tau - s * (tau - t)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, t, t + 1.0, 15, 1e-15);
}

double phi(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

std::vector<double> thresholds(const patent_rent::FeeSchedule& schedule, double d, double s) {
  int first = 0;
  for (int t = 2; t <= 19 && first == 0; ++t) {
    if (schedule.cost_at(t) > 0.0) first = t;
  }
  std::vector<double> out;
  for (int t = 2; t <= 19; ++t) {
    const int age = t < first ? first : t;
    out.push_back(std::log(schedule.cost_at(age) / z_quadrature(d, s, age)));
  }
  return out;
}

std::vector<double> expiry_pmf(const patent_rent::ModelParams& params, double index,
                               const patent_rent::FeeSchedule& schedule, double s) {
  const std::vector<double> th = thresholds(schedule, params.d, s);
  const auto F = [&](int t) { return phi((th[static_cast<std::size_t>(t - 2)] - index) / params.sigma); };
  std::vector<double> p;
  p.push_back(F(2));
  for (int t = 3; t <= 19; ++t) p.push_back(F(t) - F(t - 1));
  p.push_back(1.0 - F(19));
  return p;
}

Moments truncated_normal_moments(double sigma, double lo, double hi) {
  const boost::math::normal_distribution<double> n;
  const double a = lo / sigma, b = hi / sigma;
  const double pa = std::isinf(a) ? 0.0 : boost::math::pdf(n, a);
  const double pb = std::isinf(b) ? 0.0 : boost::math::pdf(n, b);
  const double apa = std::isinf(a) ? 0.0 : a * pa;
  const double bpb = std::isinf(b) ? 0.0 : b * pb;
  // Mass on the side that avoids cancellation.
  const double mass = a > 0.0 ? phi(-a) - phi(-b) : phi(b) - phi(a);
  const double m = (pa - pb) / mass;
  return {sigma * m, sigma * sigma * (1.0 + (apa - bpb) / mass - m * m)};
}

double npv_recursive(double r0, double d, const patent_rent::FeeSchedule& schedule, double s, int T) {
  if (T == 0) return 0.0;
  return npv_recursive(r0, d, schedule, s, T - 1) +
         (r0 * std::exp(-d * T) - schedule.cost_at(T)) / std::pow(1.0 + s, T);
}

}  // namespace oracle
