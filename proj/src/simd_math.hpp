#pragma once

// Vectorizable elementary functions for the hot likelihood loops.

#include <cmath>
#include <cstdint>
#include <bit>

#if defined(__x86_64__) && defined(__GLIBC__) && !defined(__FAST_MATH__) && defined(__GNUC__) && !defined(__clang__)
// glibc only advertises its vector log (libmvec) under -ffast-math.
extern "C" {
__attribute__((__simd__("notinbranch"))) double log(double) noexcept;
}
#endif

namespace scalemix::detail {

// exp(x) for x <= 709, branch-free so `omp simd` loops vectorize it. Inputs
// below -600 are clamped there: the result never drops below 2.6e-261, so
// products with modest coefficients stay clear of subnormals. Callers must
// treat sums below ~1e-200 as unreliable. Relative error about 1 ulp. Needs
// -fno-trapping-math for the clamps to be if-converted.
inline double exp_floor(double x) {
  constexpr double kLog2e = 1.4426950408889634;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kShifter = 6755399441055744.0;  // 1.5 * 2^52
  x = x < -600.0 ? -600.0 : x;
  x = x > 709.0 ? 709.0 : x;
  double kd = x * kLog2e + kShifter;
  const auto ki = std::bit_cast<std::uint64_t>(kd);
  kd -= kShifter;
  const double r = (x - kd * kLn2Hi) - kd * kLn2Lo;
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::uint64_t bits = (ki + 1023u) << 52;
  return p * std::bit_cast<double>(bits);
}

}  // namespace scalemix::detail
