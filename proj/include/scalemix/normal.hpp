#pragma once

#include <numbers>

namespace scalemix {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double standard_normal_pdf(double x);
double standard_normal_log_pdf(double x);

/// Standard Gaussian CDF. Evaluated through erfc on the negative half-line so
/// the lower tail keeps full relative precision; the upper half is 1 - Phi(-x).
double standard_normal_cdf(double x);

/// Inverse of standard_normal_cdf on (0, 1). Acklam's rational approximation
/// followed by one Halley step against the erfc-based CDF (|error| ~ 1e-15).
double standard_normal_quantile(double p);

}  // namespace scalemix
