#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "scalemix/baselines.hpp"
#include "scalemix/profile_mle.hpp"
#include "scalemix/rng.hpp"

namespace scalemix {

/// Exactly floor(m) scales from Unif[sigma_lo, 1] and the rest from
/// Unif[1, sigma_hi], shuffled. m is n^m_exponent or m_count (exactly one set;
/// the default is m = sqrt(n)).
struct SubsetOfSignals {
  std::optional<double> m_exponent = 0.5;
  std::optional<double> m_count;
  double sigma_lo = 0.7;
  double sigma_hi = 150.0;

  std::size_t signal_count(std::size_t n) const;
};

/// I.i.d. categorical draws from (weight, sigma) pairs.
struct PointMixture {
  std::vector<std::pair<double, double>> components;
};

struct EqualVariance {
  double sigma = 1.0;
};

/// sigma_i = scale * i for i = 1..n.
struct QuadraticVariance {
  double scale = 1.0;
};

using PriorSpec = std::variant<SubsetOfSignals, PointMixture, EqualVariance, QuadraticVariance>;

void validate_prior(const PriorSpec& prior);

std::vector<double> sample_sigmas(const PriorSpec& prior, std::size_t n, CounterRng& rng);

enum class Estimator { eb, median, iter_trunc, oracle_linear, known_prior_mle };

std::string_view estimator_name(Estimator e);
/// Throws on an unknown name.
Estimator parse_estimator(std::string_view name);

struct ExperimentConfig {
  double true_mu = 0.0;
  PriorSpec prior = SubsetOfSignals{0.5, std::nullopt, 0.7, 150.0};
  std::vector<std::size_t> n_grid = {100, 200, 500, 1000, 2000, 5000};
  int replications = 50;
  std::uint64_t seed = 20240601;
  std::vector<Estimator> estimators = {Estimator::eb, Estimator::median, Estimator::iter_trunc};
  JointFitConfig eb;
  IterTruncConfig iter_trunc;
  int known_prior_grid_points = 5000;
  bool retain_raw_errors = false;
  /// Worker threads for replications; results do not depend on it.
  int threads = 1;

  void validate() const;
};

struct EstimatorSummary {
  Estimator estimator;
  std::size_t n;
  int replications;  ///< successful replications entering the aggregates
  double mean_abs_error;
  double std_abs_error;  ///< sample standard deviation; 0 for a single replication
  int failures;
  /// |estimate - mu| by replication index; NaN marks a failed replication.
  /// Filled only when retain_raw_errors is set.
  std::vector<double> raw_errors;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<EstimatorSummary> rows;  ///< ordered by n, then by config.estimators
};

/// One replication: the data for (seed, n, replication) and the absolute
/// error of each configured estimator (NaN on failure), in config order.
struct ReplicationResult {
  std::vector<double> sigmas;
  std::vector<double> data;
  std::vector<double> abs_errors;
  std::vector<std::string> failure_messages;  ///< empty string on success
};

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t n, int replication);

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace scalemix
