#pragma once

#include <span>
#include <vector>

#include "scalemix/mixing.hpp"
#include "scalemix/npmle.hpp"

namespace scalemix {

struct JointFitConfig {
  int mu_grid_points = 5000;
  double outer_tol = 1e-8;
  int max_outer_iters = 50;
  /// Start each NPMLE from the previous outer iterate instead of the evenly
  /// spaced initial atoms.
  bool warm_start = false;
  /// One extra location search on a grid of the same size spanning +-2 coarse
  /// gaps around the incumbent, followed by one more NPMLE at the result.
  bool refine_mu = true;
  NpmleConfig npmle;

  void validate() const;
};

struct OuterStep {
  double mu;
  double log_likelihood;  ///< total (unnormalized) log-likelihood at (mu, G_t)
};

/// Optional comparison point for the likelihood-gap diagnostic.
struct ReferencePair {
  double mu;
  MixingDistribution mixing;
};

struct JointFitReport {
  double mu_hat;
  MixingDistribution mixing_hat;
  std::vector<OuterStep> outer_trace;
  bool converged = false;
  /// log L(mu_hat, G_hat) - log L(reference); NaN without a reference.
  double likelihood_gap_log;
  double log_likelihood;  ///< total log-likelihood at (mu_hat, G_hat)
  double kkt_residual;    ///< from the NPMLE fit that produced G_hat
  int iterations = 0;     ///< outer iterations performed
};

/// Grid argmax of total_log_likelihood on a uniform grid over [min X, max X].
/// Ties go to the point closest to the sample median, then to the smaller value.
double estimate_mu_given_g(std::span<const double> data, const MixingDistribution& mixing, int grid_points);

/// Same search on a uniform grid over [center - half_width, center + half_width]
/// intersected with [min X, max X].
double refine_mu_given_g(std::span<const double> data, const MixingDistribution& mixing, double center,
                         double half_width, int grid_points);

/// Successive maximization: NPMLE at fixed mu, then grid search for mu at fixed
/// G, starting from the sample median. Returns the best iterate seen.
JointFitReport fit_joint(std::span<const double> data, const JointFitConfig& config = {},
                         const ReferencePair* reference = nullptr);

}  // namespace scalemix
