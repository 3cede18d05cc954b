#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "scalemix/normal.hpp"

namespace scalemix {

/// Discrete distribution over scales: atoms sigma_j >= 0 (strictly increasing)
/// with simplex weights. Atoms closer than 1e-12 (relative) are merged and
/// zero-weight atoms are dropped at construction.
class MixingDistribution {
 public:
  /// Weights must be nonnegative and sum to 1 within 1e-9; they are then
  /// renormalized so the stored weights sum to 1 within 1e-12.
  MixingDistribution(std::vector<double> atoms, std::vector<double> weights);

  static MixingDistribution point_mass(double sigma);
  /// Divides the weights by their sum before constructing.
  static MixingDistribution from_unnormalized(std::vector<double> atoms, std::vector<double> weights);
  /// Empirical distribution (1/n) sum_i delta_{sigma_i}.
  static MixingDistribution empirical(std::span<const double> sigmas);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

  double min_atom() const { return atoms_.front(); }
  double max_atom() const { return atoms_.back(); }
  bool has_zero_atom() const { return atoms_.front() == 0.0; }

  /// G([lo, hi]).
  double mass_on(double lo, double hi) const;
  /// E_G[sigma^2].
  double second_moment() const;
  /// Every atom multiplied by c > 0.
  MixingDistribution scaled(double c) const;

  bool operator==(const MixingDistribution&) const = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// Location-scale mixture f_{mu,G}(x) = E_{sigma~G}[(1/sigma) phi((x - mu)/sigma)].
struct LocationScaleMixture {
  double mu;
  MixingDistribution mixing;

  double log_density(double x) const;
  double density(double x) const;
};

/// log f_{mu,G}(x) through a max-shifted log-sum-exp. Zero atoms contribute
/// +inf at x == mu and nothing elsewhere; if every atom is zero and x != mu
/// the result is -inf.
double log_mixture_density(double x, double mu, const MixingDistribution& mixing);

/// sum_i log f_{mu,G}(X_i) (not normalized by n). Throws on empty data.
double total_log_likelihood(std::span<const double> data, double mu, const MixingDistribution& mixing);

/// log((1/sigma) phi(a/sigma)).
inline double log_scale_kernel(double a, double sigma) {
  const double z = a / sigma;
  return -std::log(sigma) - kLogSqrt2Pi - 0.5 * z * z;
}

}  // namespace scalemix
