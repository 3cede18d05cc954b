#include "scalemix/profile_mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mixture_kernel.hpp"
#include "scalemix/baselines.hpp"
#include "scalemix/error.hpp"

namespace scalemix {

namespace {

double grid_search(std::span<const double> data, const MixingDistribution& mixing, double lo, double hi,
                   int grid_points) {
  if (grid_points < 2) throw Error("location grid needs at least 2 points");
  if (lo == hi) return lo;
  const double median = sample_median(data);
  const detail::MixtureKernel kernel(mixing);
  std::vector<double> scratch;
  double best_mu = lo;
  double best_ll = -std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  for (int k = 0; k < grid_points; ++k) {
    const double mu = (k == grid_points - 1) ? hi : lo + step * k;
    const double ll = kernel.total_log_likelihood(data, mu, scratch);
    if (ll > best_ll) {
      best_ll = ll;
      best_mu = mu;
    } else if (ll == best_ll) {
      const double dn = std::abs(mu - median);
      const double db = std::abs(best_mu - median);
      if (dn < db || (dn == db && mu < best_mu)) best_mu = mu;
    }
  }
  return best_mu;
}

bool all_equal(std::span<const double> data) {
  return std::all_of(data.begin(), data.end(), [&](double x) { return x == data.front(); });
}

}  // namespace

void JointFitConfig::validate() const {
  if (mu_grid_points < 2) throw Error("JointFitConfig: mu_grid_points must be >= 2");
  if (!(outer_tol > 0.0)) throw Error("JointFitConfig: outer_tol must be positive");
  if (max_outer_iters < 1) throw Error("JointFitConfig: max_outer_iters must be positive");
  npmle.validate();
}

double estimate_mu_given_g(std::span<const double> data, const MixingDistribution& mixing, int grid_points) {
  if (data.empty()) throw Error("estimate_mu_given_g: empty data");
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  return grid_search(data, mixing, *lo, *hi, grid_points);
}

double refine_mu_given_g(std::span<const double> data, const MixingDistribution& mixing, double center,
                         double half_width, int grid_points) {
  if (data.empty()) throw Error("refine_mu_given_g: empty data");
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  return grid_search(data, mixing, std::max(*lo, center - half_width), std::min(*hi, center + half_width),
                     grid_points);
}

JointFitReport fit_joint(std::span<const double> data, const JointFitConfig& config,
                         const ReferencePair* reference) {
  config.validate();
  if (data.size() < 2) throw Error("fit_joint: need at least 2 observations");
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (all_equal(data)) {
    JointFitReport report{data.front(), MixingDistribution::point_mass(0.0), {}, true, nan,
                          std::numeric_limits<double>::infinity(), 0.0, 0};
    report.outer_trace.push_back({data.front(), report.log_likelihood});
    if (reference != nullptr)
      report.likelihood_gap_log = report.log_likelihood - total_log_likelihood(data, reference->mu, reference->mixing);
    return report;
  }

  std::vector<double> residuals(data.size());
  auto npmle_at = [&](double mu, const MixingDistribution* start) {
    for (std::size_t i = 0; i < data.size(); ++i) residuals[i] = data[i] - mu;
    return fit_npmle(residuals, config.npmle, start);
  };

  struct Incumbent {
    double mu;
    MixingDistribution mixing;
    double ll;
    double kkt;
  };
  std::optional<Incumbent> best;
  JointFitReport report{0.0, MixingDistribution::point_mass(1.0), {}, false, nan, 0.0, 0.0, 0};

  double mu = sample_median(data);
  std::optional<MixingDistribution> previous;
  double previous_ll = -std::numeric_limits<double>::infinity();

  auto consider = [&](double m, const MixingDistribution& g, double ll, double kkt) {
    if (!best || ll > best->ll) best = Incumbent{m, g, ll, kkt};
  };

  for (int t = 1; t <= config.max_outer_iters; ++t) {
    const MixingDistribution* start = (config.warm_start && previous) ? &*previous : nullptr;
    NpmleFitReport fit = npmle_at(mu, start);
    MixingDistribution g = fit.mixing;
    double ll_here = total_log_likelihood(data, mu, g);
    if (previous) {
      // A fresh NPMLE that lands below the carried-over G is discarded.
      const double carried = total_log_likelihood(data, mu, *previous);
      if (carried > ll_here) {
        g = *previous;
        ll_here = carried;
      }
    }
    double next_mu = estimate_mu_given_g(data, g, config.mu_grid_points);
    double ll_next = total_log_likelihood(data, next_mu, g);
    if (ll_next < ll_here) {
      next_mu = mu;
      ll_next = ll_here;
    }
    report.outer_trace.push_back({next_mu, ll_next});
    report.iterations = t;
    consider(next_mu, g, ll_next, fit.kkt_residual);

    const double reference_ll = (t == 1) ? ll_here : previous_ll;
    const double gain = ll_next - reference_ll;
    previous = g;
    previous_ll = ll_next;
    mu = next_mu;
    if (t > 1 && gain <= config.outer_tol * std::abs(reference_ll)) {
      report.converged = true;
      break;
    }
  }

  if (config.refine_mu) {
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    const double gap = (*hi - *lo) / static_cast<double>(config.mu_grid_points - 1);
    const MixingDistribution g = best->mixing;
    const double fine = refine_mu_given_g(data, g, best->mu, 2.0 * gap, config.mu_grid_points);
    NpmleFitReport fit = npmle_at(fine, config.warm_start ? &g : nullptr);
    MixingDistribution refit = fit.mixing;
    double ll_fine = total_log_likelihood(data, fine, refit);
    const double carried = total_log_likelihood(data, fine, g);
    if (carried > ll_fine) {
      refit = g;
      ll_fine = carried;
    }
    if (ll_fine > best->ll) {
      report.outer_trace.push_back({fine, ll_fine});
      consider(fine, refit, ll_fine, fit.kkt_residual);
    }
  }

  report.mu_hat = best->mu;
  report.mixing_hat = best->mixing;
  report.log_likelihood = best->ll;
  report.kkt_residual = best->kkt;
  if (reference != nullptr)
    report.likelihood_gap_log = best->ll - total_log_likelihood(data, reference->mu, reference->mixing);
  return report;
}

}  // namespace scalemix
