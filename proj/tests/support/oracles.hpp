#pragma once

// Reference implementations used only by tests. They share no code with the
// library: quadrature instead of the closed-form z factor, Boost.Math instead
// of the erfc-based normal, direct recursion instead of the NPV loop.

#include <vector>

#include "patent_rent/fee_schedule.hpp"
#include "patent_rent/renewal_model.hpp"

namespace oracle {

/// Adaptive Gauss-Kronrod integral of e^{-d tau - s (tau - t)} over [t, t+1].
double z_quadrature(double d, double s, double t);

double phi(double z);

/// Cutpoints log(c_t / z_t) for t = 2..19 with the first-fee-age rule for
/// ages before the first fee; z by quadrature.
std::vector<double> thresholds(const patent_rent::FeeSchedule& schedule, double d, double s);

/// P[T = t] for t = 2..20 from direct Phi differences.
std::vector<double> expiry_pmf(const patent_rent::ModelParams& params, double index,
                               const patent_rent::FeeSchedule& schedule, double s);

/// Moments of N(0, sigma^2) truncated to [lo, hi] (either end may be infinite).
struct Moments {
  double mean;
  double variance;
};
Moments truncated_normal_moments(double sigma, double lo, double hi);

/// V(T) by the recursion V(T) = V(T-1) + (r0 e^{-dT} - c_T)(1+s)^{-T}.
double npv_recursive(double r0, double d, const patent_rent::FeeSchedule& schedule, double s, int T);

}  // namespace oracle
