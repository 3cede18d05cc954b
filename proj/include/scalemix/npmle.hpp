#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scalemix/mixing.hpp"

namespace scalemix {

/// Fixed-location NPMLE settings. Tolerances are relative improvements of the
/// total log-likelihood.
struct NpmleConfig {
  int grid_points = 5000;       ///< geometric atom-search grid size
  int init_atom_count = 5;      ///< evenly spaced initial atoms
  double weight_tol = 1e-10;    ///< EM stopping threshold
  double fw_tol = 1e-8;         ///< Frank-Wolfe stopping threshold
  int max_fw_iters = 200;
  double prune_weight = 1e-8;
  int max_weight_iters = 5000;  ///< EM iteration cap per weight solve
  double kkt_tol = 1e-6;        ///< stop once max_sigma D(sigma) <= 1 + kkt_tol on the grid

  void validate() const;
};

struct NpmleFitReport {
  MixingDistribution mixing;
  std::vector<double> log_likelihood_trace;  ///< average log-likelihood per iteration
  double kkt_residual = 0.0;                 ///< max over the search grid of D(sigma) - 1
  int iterations = 0;
  bool converged = false;
};

/// D_G(sigma) = (1/n) sum_i [(1/sigma) phi(r_i/sigma)] / f_{0,G}(r_i).
double kkt_score(const MixingDistribution& mixing, double sigma, std::span<const double> residuals);

/// Support bracket [min nonzero |r_i|, max |r_i|]. Throws when all residuals are zero.
std::pair<double, double> residual_bracket(std::span<const double> residuals);

/// Geometric grid of `points` values from lo to hi (a single point when lo == hi).
std::vector<double> geometric_grid(double lo, double hi, int points);

/// Grid maximizer of kkt_score over the residual bracket; ties go to the smaller sigma.
double find_best_atom(const MixingDistribution& mixing, std::span<const double> residuals, int grid_points);

/// Max of D_G(sigma) - 1 over a fresh geometric grid on the residual bracket.
double kkt_residual(const MixingDistribution& mixing, std::span<const double> residuals, int grid_points);

/// EM weight solve on a fixed support. Weights below config.prune_weight are
/// removed afterwards and the rest renormalized.
MixingDistribution optimize_weights(std::span<const double> support, std::span<const double> residuals,
                                    std::optional<std::span<const double>> warm_start = std::nullopt,
                                    const NpmleConfig& config = {});

/// Fully-corrective Frank-Wolfe fit of the mixing distribution with the
/// location held at zero (pass residuals X_i - mu). When `initial` is given the
/// solver starts from it instead of the evenly spaced initial atoms.
NpmleFitReport fit_npmle(std::span<const double> residuals, const NpmleConfig& config = {},
                         const MixingDistribution* initial = nullptr);

}  // namespace scalemix
