#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "scalemix/mixing.hpp"

namespace scalemix {

/// Lower median: the order statistic at 1-based index ceil(n/2).
double sample_median(std::span<const double> data);

/// Inverse-variance weighted mean sum(X_i / s_i^2) / sum(1 / s_i^2). Any
/// s_i == 0 makes the result the mean of the exactly observed points.
double oracle_linear(std::span<const double> data, std::span<const double> sigmas);

/// Location MLE with the scale mixture known; same grid (and the same one-time
/// refinement) as the profile estimator's location step.
double known_prior_mle(std::span<const double> data, const MixingDistribution& prior, int grid_points,
                       bool refine = true);

/// Winsorized-mean iteration mu <- mean(clip(X_i, mu - r_t, mu + r_t)) with
/// r_t = B * shrink^(t-1).
struct IterTruncConfig {
  double mu0 = 1.0;
  double B = 10.0;
  double shrink = 0.5;
  /// Unset means ceil(log_{1/shrink}(B * sqrt(n))), capped at 30.
  std::optional<int> iterations;

  void validate() const;
  int resolved_iterations(std::size_t n) const;
};

double iterative_truncation(std::span<const double> data, const IterTruncConfig& config = {});

}  // namespace scalemix
