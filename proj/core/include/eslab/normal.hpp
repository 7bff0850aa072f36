#pragma once

namespace eslab {

/// Standard normal density.
double normal_pdf(double x) noexcept;
/// Standard normal CDF, computed through erfc so the upper tail keeps full relative precision.
double normal_cdf(double x) noexcept;
/// Inverse standard normal CDF on (0, 1). Acklam's rational approximation
/// followed by one Halley refinement against normal_cdf; absolute error well
/// below 1e-9 on (1e-12, 1 - 1e-12). Throws DomainError outside (0, 1).
double normal_quantile(double p);

}  // namespace eslab
