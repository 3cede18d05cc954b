#pragma once

// Precomputed per-atom constants for evaluating sum_i log f_{mu,G}(X_i) at
// many locations. Internal to the library.

#include <span>
#include <vector>

#include "scalemix/mixing.hpp"

namespace scalemix::detail {

class MixtureKernel {
 public:
  explicit MixtureKernel(const MixingDistribution& mixing);

  /// sum_i log f_{mu,G}(data_i); `scratch` is resized as needed.
  double total_log_likelihood(std::span<const double> data, double mu,
                              std::vector<double>& scratch) const;

 private:
  // Positive atoms: log w_j - log sigma_j - log sqrt(2 pi), and 1/(2 sigma_j^2).
  std::vector<double> log_coef_;
  std::vector<double> lin_coef_;
  std::vector<double> half_prec_;
  double zero_atom_weight_ = 0.0;

  double stable_log_density(double d2) const;
};

}  // namespace scalemix::detail
