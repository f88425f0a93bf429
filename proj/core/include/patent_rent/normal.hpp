#pragma once

namespace patent_rent {

/// Standard normal density.
double normal_pdf(double z) noexcept;

/// Lower tail Phi(z), evaluated through erfc so that the left tail keeps full
/// relative precision down to the underflow limit (z around -38).
double normal_cdf(double z) noexcept;

/// Upper tail 1 - Phi(z) = Phi(-z), relative-accurate for large positive z.
double normal_ccdf(double z) noexcept;

/// Phi(b) - Phi(a) for a <= b, computed on whichever side of zero avoids
/// cancellation. For a > b the signed difference is returned unchanged.
double normal_interval_mass(double a, double b) noexcept;

/// Inverse of Phi on (0, 1) (Wichura's AS 241, about 1e-16 relative error).
/// Returns -inf / +inf at 0 / 1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

}  // namespace patent_rent
