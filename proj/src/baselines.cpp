#include "scalemix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "scalemix/error.hpp"
#include "scalemix/profile_mle.hpp"

namespace scalemix {

double sample_median(std::span<const double> data) {
  if (data.empty()) throw Error("sample_median: empty data");
  std::vector<double> v(data.begin(), data.end());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double oracle_linear(std::span<const double> data, std::span<const double> sigmas) {
  if (data.size() != sigmas.size()) throw Error("oracle_linear: data/sigma length mismatch");
  if (data.empty()) throw Error("oracle_linear: empty data");
  double exact_sum = 0.0;
  std::size_t exact_count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (sigmas[i] < 0.0) throw Error("oracle_linear: negative sigma");
    if (sigmas[i] == 0.0) {
      exact_sum += data[i];
      ++exact_count;
    }
  }
  if (exact_count > 0) return exact_sum / static_cast<double>(exact_count);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double prec = 1.0 / (sigmas[i] * sigmas[i]);
    num += data[i] * prec;
    den += prec;
  }
  return num / den;
}

double known_prior_mle(std::span<const double> data, const MixingDistribution& prior, int grid_points,
                       bool refine) {
  if (data.empty()) throw Error("known_prior_mle: empty data");
  const double mu = estimate_mu_given_g(data, prior, grid_points);
  if (!refine || grid_points < 2) return mu;
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double gap = (*hi - *lo) / static_cast<double>(grid_points - 1);
  if (gap == 0.0) return mu;
  const double fine = refine_mu_given_g(data, prior, mu, 2.0 * gap, grid_points);
  return total_log_likelihood(data, fine, prior) > total_log_likelihood(data, mu, prior) ? fine : mu;
}

void IterTruncConfig::validate() const {
  if (!(B > 0.0)) throw Error("IterTruncConfig: B must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error("IterTruncConfig: shrink must lie in (0, 1)");
  if (iterations && *iterations < 1) throw Error("IterTruncConfig: iterations must be positive");
}

int IterTruncConfig::resolved_iterations(std::size_t n) const {
  if (iterations) return *iterations;
  const double raw = std::log(B * std::sqrt(static_cast<double>(n))) / std::log(1.0 / shrink);
  return std::clamp(static_cast<int>(std::ceil(raw)), 1, 30);
}

double iterative_truncation(std::span<const double> data, const IterTruncConfig& config) {
  config.validate();
  if (data.empty()) throw Error("iterative_truncation: empty data");
  const int rounds = config.resolved_iterations(data.size());
  double mu = config.mu0;
  double radius = config.B;
  for (int t = 0; t < rounds; ++t) {
    double acc = 0.0;
    for (double x : data) acc += std::clamp(x, mu - radius, mu + radius);
    mu = acc / static_cast<double>(data.size());
    radius *= config.shrink;
  }
  return mu;
}

}  // namespace scalemix
