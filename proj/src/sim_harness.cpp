#include "scalemix/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double estimate(Estimator e, const ExperimentConfig& config, std::span<const double> data,
                std::span<const double> sigmas) {
  switch (e) {
    case Estimator::eb:
      return fit_joint(data, config.eb).mu_hat;
    case Estimator::median:
      return sample_median(data);
    case Estimator::iter_trunc:
      return iterative_truncation(data, config.iter_trunc);
    case Estimator::oracle_linear:
      return oracle_linear(data, sigmas);
    case Estimator::known_prior_mle:
      return known_prior_mle(data, MixingDistribution::empirical(sigmas), config.known_prior_grid_points);
  }
  throw Error("unknown estimator");
}

}  // namespace

std::size_t SubsetOfSignals::signal_count(std::size_t n) const {
  const double m = m_exponent ? std::pow(static_cast<double>(n), *m_exponent) : *m_count;
  // Guard against pow landing just below an integer (1000^(1/3) = 9.999...).
  const double floored = std::floor(m * (1.0 + 1e-12));
  if (floored > static_cast<double>(n)) throw Error("SubsetOfSignals: m exceeds n");
  return static_cast<std::size_t>(floored);
}

void validate_prior(const PriorSpec& prior) {
  std::visit(Overloaded{
                 [](const SubsetOfSignals& p) {
                   if (p.m_exponent.has_value() == p.m_count.has_value())
                     throw Error("SubsetOfSignals: set exactly one of m_exponent and m_count");
                   if (p.m_exponent && !(*p.m_exponent >= 0.0 && *p.m_exponent <= 1.0))
                     throw Error("SubsetOfSignals: m_exponent must lie in [0, 1]");
                   if (p.m_count && !(*p.m_count >= 0.0)) throw Error("SubsetOfSignals: m_count must be >= 0");
                   if (!(p.sigma_lo >= 0.0 && p.sigma_lo <= 1.0 && p.sigma_hi >= 1.0 && std::isfinite(p.sigma_hi)))
                     throw Error("SubsetOfSignals: need 0 <= sigma_lo <= 1 <= sigma_hi");
                 },
                 [](const PointMixture& p) {
                   if (p.components.empty()) throw Error("PointMixture: no components");
                   double total = 0.0;
                   for (const auto& [w, s] : p.components) {
                     if (!(w >= 0.0)) throw Error("PointMixture: negative weight");
                     if (!(s >= 0.0) || !std::isfinite(s)) throw Error("PointMixture: sigma must be finite and >= 0");
                     total += w;
                   }
                   if (std::abs(total - 1.0) > 1e-9) throw Error("PointMixture: weights must sum to 1");
                 },
                 [](const EqualVariance& p) {
                   if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) throw Error("EqualVariance: sigma must be >= 0");
                 },
                 [](const QuadraticVariance& p) {
                   if (!(p.scale >= 0.0) || !std::isfinite(p.scale))
                     throw Error("QuadraticVariance: scale must be >= 0");
                 },
             },
             prior);
}

std::vector<double> sample_sigmas(const PriorSpec& prior, std::size_t n, CounterRng& rng) {
  if (n < 1) throw Error("sample_sigmas: n must be >= 1");
  validate_prior(prior);
  std::vector<double> out(n);
  std::visit(Overloaded{
                 [&](const SubsetOfSignals& p) {
                   const std::size_t m = p.signal_count(n);
                   for (std::size_t i = 0; i < n; ++i)
                     out[i] = i < m ? rng.uniform(p.sigma_lo, 1.0) : rng.uniform(1.0, p.sigma_hi);
                   for (std::size_t i = n - 1; i > 0; --i) std::swap(out[i], out[rng.below(i + 1)]);
                 },
                 [&](const PointMixture& p) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double u = rng.uniform();
                     double acc = 0.0;
                     std::size_t k = 0;
                     for (; k + 1 < p.components.size(); ++k) {
                       acc += p.components[k].first;
                       if (u < acc) break;
                     }
                     out[i] = p.components[k].second;
                   }
                 },
                 [&](const EqualVariance& p) { std::fill(out.begin(), out.end(), p.sigma); },
                 [&](const QuadraticVariance& p) {
                   for (std::size_t i = 0; i < n; ++i) out[i] = p.scale * static_cast<double>(i + 1);
                 },
             },
             prior);
  return out;
}

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::eb: return "eb";
    case Estimator::median: return "median";
    case Estimator::iter_trunc: return "iter_trunc";
    case Estimator::oracle_linear: return "oracle_linear";
    case Estimator::known_prior_mle: return "known_prior_mle";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  for (Estimator e : {Estimator::eb, Estimator::median, Estimator::iter_trunc, Estimator::oracle_linear,
                      Estimator::known_prior_mle})
    if (estimator_name(e) == name) return e;
  throw Error("unknown estimator '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (!std::isfinite(true_mu)) throw Error("ExperimentConfig: true_mu must be finite");
  validate_prior(prior);
  if (n_grid.empty()) throw Error("ExperimentConfig: n_grid is empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw Error("ExperimentConfig: sample sizes must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw Error("ExperimentConfig: n_grid must be strictly increasing");
  }
  if (replications < 1) throw Error("ExperimentConfig: replications must be >= 1");
  for (std::size_t a = 0; a < estimators.size(); ++a)
    for (std::size_t b = a + 1; b < estimators.size(); ++b)
      if (estimators[a] == estimators[b]) throw Error("ExperimentConfig: duplicate estimator");
  eb.validate();
  iter_trunc.validate();
  if (known_prior_grid_points < 2) throw Error("ExperimentConfig: known_prior_grid_points must be >= 2");
  if (threads < 1) throw Error("ExperimentConfig: threads must be >= 1");
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t n, int replication) {
  CounterRng rng = CounterRng::substream(config.seed, n, static_cast<std::uint64_t>(replication));
  ReplicationResult out;
  out.sigmas = sample_sigmas(config.prior, n, rng);
  out.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.data[i] = config.true_mu + out.sigmas[i] * rng.normal();
  for (Estimator e : config.estimators) {
    try {
      const double est = estimate(e, config, out.data, out.sigmas);
      if (!std::isfinite(est)) throw Error("non-finite estimate");
      out.abs_errors.push_back(std::abs(est - config.true_mu));
      out.failure_messages.emplace_back();
    } catch (const std::exception& ex) {
      out.abs_errors.push_back(kNaN);
      out.failure_messages.emplace_back(ex.what());
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t n_est = config.estimators.size();
  const std::size_t tasks = config.n_grid.size() * reps;
  // errors[(task) * n_est + e], task = grid index * reps + replication.
  std::vector<double> errors(tasks * n_est, kNaN);
  std::vector<std::exception_ptr> fatal(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      try {
        const ReplicationResult r = run_replication(config, config.n_grid[t / reps], static_cast<int>(t % reps));
        std::copy(r.abs_errors.begin(), r.abs_errors.end(), errors.begin() + static_cast<std::ptrdiff_t>(t * n_est));
      } catch (...) {
        fatal[t] = std::current_exception();
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(config.threads), tasks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  // Sampling errors (bad prior for this n) are configuration errors, not
  // estimator failures.
  for (const auto& e : fatal)
    if (e) std::rethrow_exception(e);

  ExperimentReport report{config, {}};
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    for (std::size_t e = 0; e < n_est; ++e) {
      std::vector<double> raw(reps), ok;
      for (std::size_t r = 0; r < reps; ++r) {
        raw[r] = errors[(g * reps + r) * n_est + e];
        if (!std::isnan(raw[r])) ok.push_back(raw[r]);
      }
      EstimatorSummary row{config.estimators[e], config.n_grid[g], static_cast<int>(ok.size()), kNaN, kNaN,
                           static_cast<int>(reps - ok.size()), {}};
      if (!ok.empty()) {
        row.mean_abs_error = compensated_sum(ok) / static_cast<double>(ok.size());
        if (ok.size() == 1) {
          row.std_abs_error = 0.0;
        } else {
          std::vector<double> sq(ok.size());
          for (std::size_t k = 0; k < ok.size(); ++k) sq[k] = (ok[k] - row.mean_abs_error) * (ok[k] - row.mean_abs_error);
          row.std_abs_error = std::sqrt(compensated_sum(sq) / static_cast<double>(ok.size() - 1));
        }
      }
      if (config.retain_raw_errors) row.raw_errors = std::move(raw);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace scalemix
