#pragma once

#include <functional>
#include <span>

namespace scalemix {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;  ///< sum of per-panel Richardson estimates
  int panels = 0;                   ///< accepted Simpson panels
};

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`. Each accepted
/// panel contributes S2 + (S2 - S1)/15. Panels at `max_depth` are accepted
/// as they are and still counted in the error estimate.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                  int max_depth = 48);

/// Same over consecutive pieces [x_0, x_1], [x_1, x_2], ... of sorted
/// breakpoints. Half the tolerance is split evenly over the pieces and half
/// in proportion to their length.
QuadratureResult adaptive_simpson_piecewise(const std::function<double(double)>& f, std::span<const double> breaks,
                                            double tol, int max_depth = 48);

}  // namespace scalemix
