#include "scalemix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixture_kernel.hpp"
#include "simd_math.hpp"
#include "scalemix/error.hpp"

namespace scalemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_atom(double a, double b) {
  return a == b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

MixingDistribution::MixingDistribution(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty()) throw Error("MixingDistribution: no atoms");
  if (atoms.size() != weights.size()) throw Error("MixingDistribution: atoms/weights length mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!std::isfinite(atoms[j]) || atoms[j] < 0.0)
      throw Error("MixingDistribution: atoms must be finite and nonnegative");
    if (!std::isfinite(weights[j]) || weights[j] < 0.0)
      throw Error("MixingDistribution: weights must be finite and nonnegative");
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("MixingDistribution: weights do not sum to 1");

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t idx : order) {
    if (weights[idx] == 0.0) continue;
    if (!atoms_.empty() && same_atom(atoms_.back(), atoms[idx])) {
      weights_.back() += weights[idx];
    } else {
      atoms_.push_back(atoms[idx]);
      weights_.push_back(weights[idx]);
    }
  }
  if (atoms_.empty()) throw Error("MixingDistribution: all weights are zero");
  const double kept = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (double& w : weights_) w /= kept;
}

MixingDistribution MixingDistribution::point_mass(double sigma) { return {{sigma}, {1.0}}; }

MixingDistribution MixingDistribution::from_unnormalized(std::vector<double> atoms,
                                                         std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) throw Error("MixingDistribution: weights have no positive mass");
  for (double& w : weights) w /= total;
  return {std::move(atoms), std::move(weights)};
}

MixingDistribution MixingDistribution::empirical(std::span<const double> sigmas) {
  if (sigmas.empty()) throw Error("MixingDistribution: empty sample");
  std::vector<double> atoms(sigmas.begin(), sigmas.end());
  std::vector<double> weights(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  return from_unnormalized(std::move(atoms), std::move(weights));
}

double MixingDistribution::mass_on(double lo, double hi) const {
  double m = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j)
    if (atoms_[j] >= lo && atoms_[j] <= hi) m += weights_[j];
  return m;
}

double MixingDistribution::second_moment() const {
  double m = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j) m += weights_[j] * atoms_[j] * atoms_[j];
  return m;
}

MixingDistribution MixingDistribution::scaled(double c) const {
  if (!(c > 0.0)) throw Error("MixingDistribution::scaled: factor must be positive");
  std::vector<double> a(atoms_);
  for (double& x : a) x *= c;
  return {std::move(a), weights_};
}

double LocationScaleMixture::log_density(double x) const { return log_mixture_density(x, mu, mixing); }

double LocationScaleMixture::density(double x) const { return std::exp(log_density(x)); }

double log_mixture_density(double x, double mu, const MixingDistribution& mixing) {
  const double d = x - mu;
  const auto atoms = mixing.atoms();
  const auto weights = mixing.weights();

  double peak = -kInf;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j] == 0.0) {
      if (d == 0.0) return kInf;
      continue;
    }
    peak = std::max(peak, std::log(weights[j]) + log_scale_kernel(d, atoms[j]));
  }
  if (peak == -kInf) return -kInf;

  double sum = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j] == 0.0) continue;
    sum += std::exp(std::log(weights[j]) + log_scale_kernel(d, atoms[j]) - peak);
  }
  return peak + std::log(sum);
}

double total_log_likelihood(std::span<const double> data, double mu, const MixingDistribution& mixing) {
  if (data.empty()) throw Error("total_log_likelihood: empty data");
  std::vector<double> scratch;
  return detail::MixtureKernel(mixing).total_log_likelihood(data, mu, scratch);
}

namespace detail {

MixtureKernel::MixtureKernel(const MixingDistribution& mixing) {
  const auto atoms = mixing.atoms();
  const auto weights = mixing.weights();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j] == 0.0) {
      zero_atom_weight_ += weights[j];
      continue;
    }
    log_coef_.push_back(std::log(weights[j]) - std::log(atoms[j]) - kLogSqrt2Pi);
    lin_coef_.push_back(weights[j] / atoms[j] * kInvSqrt2Pi);
    half_prec_.push_back(0.5 / (atoms[j] * atoms[j]));
  }
}

double MixtureKernel::stable_log_density(double d2) const {
  double peak = -kInf;
  for (std::size_t j = 0; j < log_coef_.size(); ++j) peak = std::max(peak, log_coef_[j] - d2 * half_prec_[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < log_coef_.size(); ++j) sum += std::exp(log_coef_[j] - d2 * half_prec_[j] - peak);
  return peak + std::log(sum);
}

double MixtureKernel::total_log_likelihood(std::span<const double> data, double mu,
                                           std::vector<double>& scratch) const {
  const std::size_t n = data.size();
  if (zero_atom_weight_ > 0.0) {
    for (double x : data)
      if (x - mu == 0.0) return kInf;
  }
  if (log_coef_.empty()) return -kInf;

  scratch.assign(3 * n, 0.0);
  double* d2 = scratch.data();
  double* lin = scratch.data() + n;
  double* lg = scratch.data() + 2 * n;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = data[i] - mu;
    d2[i] = d * d;
  }
  // Linear-space accumulation vectorizes; points that underflow are redone
  // in log space below.
  for (std::size_t j = 0; j < lin_coef_.size(); ++j) {
    const double c = lin_coef_[j];
    const double h = half_prec_[j];
#pragma omp simd
    for (std::size_t i = 0; i < n; ++i) lin[i] += c * detail::exp_floor(-d2[i] * h);
  }
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) lg[i] = std::log(lin[i] > 1e-200 ? lin[i] : 1e-200);
  double total = 0.0;
  std::size_t bad = 0;
#pragma omp simd reduction(+ : total, bad)
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = lin[i] > 1e-200 && lin[i] < kInf;
    total += ok ? lg[i] : 0.0;
    bad += ok ? 0 : 1;
  }
  if (bad > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(lin[i] > 1e-200 && lin[i] < kInf)) total += stable_log_density(d2[i]);
    }
  }
  return total;
}

}  // namespace detail
}  // namespace scalemix
