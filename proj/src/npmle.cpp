#include "scalemix/npmle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scalemix/error.hpp"
#include "simd_math.hpp"

namespace scalemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> abs_values(std::span<const double> r) {
  std::vector<double> a(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) a[i] = std::abs(r[i]);
  return a;
}

std::size_t distinct_nonzero_count(std::span<const double> abs_r) {
  std::vector<double> v;
  v.reserve(abs_r.size());
  for (double a : abs_r)
    if (a > 0.0) v.push_back(a);
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

bool same_atom(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

// Weights over a fixed support, with columns E_j[i] = exp(log K_j(r_i) - shift_i)
// where shift_i is the row max over the support. Keeps every point's scaled
// density f~_i = sum_j w_j E_j[i] away from underflow.
class SupportModel {
 public:
  explicit SupportModel(std::span<const double> abs_r) : abs_r_(abs_r) {}

  std::size_t n() const { return abs_r_.size(); }
  const std::vector<double>& atoms() const { return atoms_; }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights_view() const { return weights_; }

  void set_support(std::vector<double> atoms, std::vector<double> weights) {
    atoms_ = std::move(atoms);
    weights_ = std::move(weights);
    log_columns_.clear();
    for (double s : atoms_) log_columns_.push_back(log_column(s));
    rescale();
  }

  /// Appends an atom with weight zero; returns its index.
  std::size_t add_atom(double sigma) {
    atoms_.push_back(sigma);
    weights_.push_back(0.0);
    log_columns_.push_back(log_column(sigma));
    rescale();
    return atoms_.size() - 1;
  }

  void remove_below(double threshold) {
    std::size_t keep = 0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if (weights_[j] < threshold) continue;
      if (keep != j) {
        atoms_[keep] = atoms_[j];
        weights_[keep] = weights_[j];
        log_columns_[keep] = std::move(log_columns_[j]);
      }
      ++keep;
    }
    if (keep == 0) return;
    const bool changed = keep != atoms_.size();
    atoms_.resize(keep);
    weights_.resize(keep);
    log_columns_.resize(keep);
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (double& w : weights_) w /= total;
    if (changed) rescale();
  }

  /// f~ = sum_j w_j E_j and the total log-likelihood sum_i (shift_i + log f~_i).
  double evaluate(std::vector<double>& scaled_density) const {
    const std::size_t m = n();
    scaled_density.assign(m, 0.0);
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      const double w = weights_[j];
      if (w == 0.0) continue;
      const double* col = columns_[j].data();
      double* f = scaled_density.data();
      for (std::size_t i = 0; i < m; ++i) f[i] += w * col[i];
    }
    double ll = 0.0;
    const double* sh = shift_.data();
    const double* fd = scaled_density.data();
#pragma omp simd reduction(+ : ll)
    for (std::size_t i = 0; i < m; ++i) ll += sh[i] + std::log(fd[i]);
    return ll;
  }

  /// EM multiplicative updates with SQUAREM extrapolation; an extrapolated
  /// step is kept only if it does not lower the likelihood, so the sequence
  /// of accepted iterates is monotone. Returns the final total log-likelihood
  /// and leaves the matching f~ in `scaled_density`.
  double run_em(double tol, int max_iters, std::vector<double>& scaled_density) {
    double ll = evaluate(scaled_density);
    const std::size_t k = atoms_.size();
    if (k == 1) return ll;
    std::vector<double> w0, w1, w2, f1, f2, f3, probe;
    int used = 0;
    while (used < max_iters) {
      w0 = weights_;
      em_step(scaled_density, w1);
      weights_ = w1;
      const double ll1 = evaluate(f1);
      em_step(f1, w2);
      weights_ = w2;
      double ll2 = evaluate(f2);
      used += 2;

      double r2 = 0.0, v2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double r = w1[j] - w0[j];
        const double v = w2[j] - 2.0 * w1[j] + w0[j];
        r2 += r * r;
        v2 += v * v;
      }
      double next = ll2;
      if (v2 > 0.0 && ll2 >= ll1) {
        const double a = std::min(-std::sqrt(r2 / v2), -1.0);
        probe.resize(k);
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const double r = w1[j] - w0[j];
          const double v = w2[j] - 2.0 * w1[j] + w0[j];
          probe[j] = std::max(w0[j] - 2.0 * a * r + a * a * v, 1e-14);
          total += probe[j];
        }
        for (double& w : probe) w /= total;
        weights_ = probe;
        evaluate(f3);
        em_step(f3, probe);
        weights_ = probe;
        const double ll3 = evaluate(f3);
        ++used;
        if (std::isfinite(ll3) && ll3 >= ll2) {
          next = ll3;
          f2.swap(f3);
        } else {
          weights_ = w2;
        }
      }
      if (!(next >= ll)) {
        // Rounding-level decrease at the fixed point.
        weights_ = w0;
        break;
      }
      scaled_density.swap(f2);
      const bool done = next - ll <= tol * std::abs(ll);
      ll = next;
      if (done) break;
    }
    return evaluate(scaled_density);
  }

  const std::vector<double>& column(std::size_t j) const { return columns_[j]; }
  const std::vector<double>& shift() const { return shift_; }

 private:
  std::span<const double> abs_r_;
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> log_columns_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> shift_;

  // w_j <- w_j * (1/n) sum_i E_j[i] / f~_i, renormalized.
  void em_step(const std::vector<double>& scaled_density, std::vector<double>& out) const {
    const std::size_t m = n();
    std::vector<double> inv_f(m);
    for (std::size_t i = 0; i < m; ++i) inv_f[i] = 1.0 / scaled_density[i];
    out.resize(atoms_.size());
    const double inv_n = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      const double* col = columns_[j].data();
      const double* inv = inv_f.data();
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < m; ++i) acc += col[i] * inv[i];
      out[j] = weights_[j] * acc * inv_n;
    }
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& w : out) w /= total;
  }

  std::vector<double> log_column(double sigma) const {
    std::vector<double> c(n());
    const double base = -std::log(sigma) - kLogSqrt2Pi;
    const double h = 0.5 / (sigma * sigma);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = base - abs_r_[i] * abs_r_[i] * h;
    return c;
  }

  void rescale() {
    const std::size_t m = n();
    shift_.assign(m, -kInf);
    for (const auto& lc : log_columns_)
      for (std::size_t i = 0; i < m; ++i) shift_[i] = std::max(shift_[i], lc[i]);
    columns_.resize(log_columns_.size());
    for (std::size_t j = 0; j < log_columns_.size(); ++j) {
      columns_[j].resize(m);
      const double* lc = log_columns_[j].data();
      const double* s = shift_.data();
      double* c = columns_[j].data();
#pragma omp simd
      for (std::size_t i = 0; i < m; ++i) c[i] = detail::exp_floor(lc[i] - s[i]);
    }
  }
};

// Scores D(sigma_k) on a fixed grid for a fixed set of residuals. Rows are
// stored as exp(log K(sigma_k, r_i) - rowmax_i) in single precision, with
// rowmax_i the analytic maximum over sigma in the bracket.
class GridScorer {
 public:
  GridScorer(std::span<const double> abs_r, std::vector<double> grid, double lo, double hi)
      : n_(abs_r.size()), grid_(std::move(grid)), rowmax_(n_), table_(grid_.size() * n_) {
    for (std::size_t i = 0; i < n_; ++i) rowmax_[i] = log_scale_kernel(abs_r[i], std::clamp(abs_r[i], lo, hi));
    std::vector<double> sq(n_);
    for (std::size_t i = 0; i < n_; ++i) sq[i] = abs_r[i] * abs_r[i];
    std::vector<double> tmp(n_);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const double s = grid_[k];
      const double base = -std::log(s) - kLogSqrt2Pi;
      const double h = 0.5 / (s * s);
#pragma omp simd
      for (std::size_t i = 0; i < n_; ++i) tmp[i] = detail::exp_floor(base - sq[i] * h - rowmax_[i]);
      float* row = table_.data() + k * n_;
      for (std::size_t i = 0; i < n_; ++i) row[i] = static_cast<float>(tmp[i]);
    }
  }

  const std::vector<double>& grid() const { return grid_; }

  /// Index of the grid maximizer of D and the maximal value, given log f(r_i)
  /// in the form shift_i + log f~_i.
  std::pair<std::size_t, double> best(std::span<const double> shift, std::span<const double> scaled_density) const {
    std::vector<double> u(n_);
#pragma omp simd
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = detail::exp_floor(rowmax_[i] - shift[i]) / scaled_density[i];
      u[i] = v < 1e300 ? v : 1e300;
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    std::size_t arg = 0;
    double top = -kInf;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const float* row = table_.data() + k * n_;
      const double* uu = u.data();
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t i = 0; i < n_; ++i) acc += static_cast<double>(row[i]) * uu[i];
      const double d = acc * inv_n;
      if (d > top) {
        top = d;
        arg = k;
      }
    }
    return {arg, top};
  }

 private:
  std::size_t n_;
  std::vector<double> grid_;
  std::vector<double> rowmax_;
  std::vector<float> table_;
};

// argmax over alpha in [0, 1] of sum_i log((1 - alpha) f_i + alpha g_i) by
// bisection on the (decreasing) derivative.
double vertex_step(std::span<const double> f, std::span<const double> g) {
  auto slope = [&](double alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double diff = g[i] - f[i];
      s += diff / (f[i] + alpha * diff);
    }
    return s;
  };
  if (slope(0.0) <= 0.0) return 0.0;
  if (slope(1.0) >= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> initial_atoms(double lo, double hi, std::size_t count) {
  if (count <= 1 || lo == hi) return {lo == hi ? lo : 0.5 * (lo + hi)};
  std::vector<double> atoms(count);
  for (std::size_t k = 0; k < count; ++k)
    atoms[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  atoms.back() = hi;
  return atoms;
}

}  // namespace

void NpmleConfig::validate() const {
  if (grid_points < 2) throw Error("NpmleConfig: grid_points must be >= 2");
  if (init_atom_count < 1) throw Error("NpmleConfig: init_atom_count must be positive");
  if (!(weight_tol > 0.0) || !(fw_tol > 0.0) || !(kkt_tol > 0.0)) throw Error("NpmleConfig: tolerances must be positive");
  if (max_fw_iters < 1 || max_weight_iters < 1) throw Error("NpmleConfig: iteration caps must be positive");
  if (!(prune_weight >= 0.0 && prune_weight <= 1e-3)) throw Error("NpmleConfig: prune_weight must lie in [0, 1e-3]");
}

double kkt_score(const MixingDistribution& mixing, double sigma, std::span<const double> residuals) {
  if (!(sigma > 0.0)) throw Error("kkt_score: sigma must be positive");
  if (residuals.empty()) throw Error("kkt_score: empty residuals");
  double acc = 0.0;
  for (double r : residuals) {
    const double lf = log_mixture_density(r, 0.0, mixing);
    if (lf == -kInf) throw Error("kkt_score: likelihood support violation");
    acc += std::exp(log_scale_kernel(r, sigma) - lf);
  }
  return acc / static_cast<double>(residuals.size());
}

std::pair<double, double> residual_bracket(std::span<const double> residuals) {
  double lo = kInf, hi = 0.0;
  for (double r : residuals) {
    const double a = std::abs(r);
    if (a > 0.0) lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (hi == 0.0) throw Error("degenerate data at location: all residuals are zero");
  return {lo, hi};
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0.0) || hi < lo) throw Error("geometric_grid: invalid range");
  if (lo == hi || points == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

std::vector<double> scores_on(const MixingDistribution& mixing, std::span<const double> residuals,
                              std::span<const double> grid) {
  std::vector<double> log_f(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    log_f[i] = log_mixture_density(residuals[i], 0.0, mixing);
    if (log_f[i] == -kInf) throw Error("kkt_score: likelihood support violation");
  }
  std::vector<double> sq(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) sq[i] = residuals[i] * residuals[i];
  std::vector<double> out(grid.size());
  const double inv_n = 1.0 / static_cast<double>(residuals.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double base = -std::log(grid[k]) - kLogSqrt2Pi;
    const double h = 0.5 / (grid[k] * grid[k]);
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t i = 0; i < sq.size(); ++i) acc += detail::exp_floor(base - sq[i] * h - log_f[i]);
    out[k] = acc * inv_n;
  }
  return out;
}

}  // namespace

double find_best_atom(const MixingDistribution& mixing, std::span<const double> residuals, int grid_points) {
  const auto [lo, hi] = residual_bracket(residuals);
  const auto grid = geometric_grid(lo, hi, grid_points);
  const auto scores = scores_on(mixing, residuals, grid);
  std::size_t arg = 0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (scores[k] > scores[arg]) arg = k;
  return grid[arg];
}

double kkt_residual(const MixingDistribution& mixing, std::span<const double> residuals, int grid_points) {
  const auto [lo, hi] = residual_bracket(residuals);
  const auto grid = geometric_grid(lo, hi, grid_points);
  const auto scores = scores_on(mixing, residuals, grid);
  return *std::max_element(scores.begin(), scores.end()) - 1.0;
}

MixingDistribution optimize_weights(std::span<const double> support, std::span<const double> residuals,
                                    std::optional<std::span<const double>> warm_start,
                                    const NpmleConfig& config) {
  if (support.empty()) throw Error("optimize_weights: empty support");
  if (residuals.empty()) throw Error("optimize_weights: empty residuals");
  for (double s : support)
    if (!(s > 0.0)) throw Error("optimize_weights: support atoms must be positive");
  std::vector<double> weights;
  if (warm_start) {
    if (warm_start->size() != support.size()) throw Error("optimize_weights: warm start length mismatch");
    weights.assign(warm_start->begin(), warm_start->end());
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error("optimize_weights: warm start has no mass");
    // Zero entries could never recover under multiplicative updates.
    for (double& w : weights) w = std::max(w / total, 1e-12);
    const double renorm = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= renorm;
  } else {
    weights.assign(support.size(), 1.0 / static_cast<double>(support.size()));
  }
  const auto abs_r = abs_values(residuals);
  SupportModel model(abs_r);
  model.set_support({support.begin(), support.end()}, std::move(weights));
  std::vector<double> f;
  model.run_em(config.weight_tol, config.max_weight_iters, f);
  model.remove_below(config.prune_weight);
  return {model.atoms(), model.weights_view()};
}

NpmleFitReport fit_npmle(std::span<const double> residuals, const NpmleConfig& config,
                         const MixingDistribution* initial) {
  config.validate();
  if (residuals.empty()) throw Error("fit_npmle: empty residuals");
  const auto [lo, hi] = residual_bracket(residuals);
  const auto abs_r = abs_values(residuals);
  const double n = static_cast<double>(abs_r.size());

  GridScorer scorer(abs_r, geometric_grid(lo, hi, config.grid_points), lo, hi);
  SupportModel model(abs_r);
  if (initial != nullptr) {
    std::vector<double> atoms, weights;
    for (std::size_t j = 0; j < initial->size(); ++j) {
      if (initial->atoms()[j] <= 0.0) continue;
      atoms.push_back(initial->atoms()[j]);
      weights.push_back(initial->weights()[j]);
    }
    if (atoms.empty()) throw Error("fit_npmle: initial mixing has no positive atom");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    model.set_support(std::move(atoms), std::move(weights));
  } else {
    const std::size_t count =
        std::min<std::size_t>(static_cast<std::size_t>(config.init_atom_count), distinct_nonzero_count(abs_r));
    auto atoms = initial_atoms(lo, hi, count);
    std::vector<double> weights(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    model.set_support(std::move(atoms), std::move(weights));
  }

  NpmleFitReport report{MixingDistribution::point_mass(1.0), {}, 0.0, 0, false};
  std::vector<double> f;
  double ll = model.run_em(config.weight_tol, config.max_weight_iters, f);

  // Drops atoms below the prune threshold unless that lowers the likelihood.
  auto prune = [&](double current) {
    auto saved_atoms = model.atoms();
    auto saved_weights = model.weights_view();
    model.remove_below(config.prune_weight);
    if (model.atoms().size() == saved_atoms.size()) return current;
    std::vector<double> trial;
    const double pruned = model.evaluate(trial);
    if (pruned >= current) {
      f.swap(trial);
      return pruned;
    }
    model.set_support(std::move(saved_atoms), std::move(saved_weights));
    model.evaluate(f);
    return current;
  };
  ll = prune(ll);
  report.log_likelihood_trace.push_back(ll / n);

  const auto& grid = scorer.grid();
  double top = 0.0;
  for (int it = 1; it <= config.max_fw_iters; ++it) {
    std::size_t arg;
    std::tie(arg, top) = scorer.best(model.shift(), f);
    if (top - 1.0 <= config.kkt_tol) {
      report.converged = true;
      break;
    }
    const double sigma = grid[arg];
    const auto& atoms = model.atoms();
    const bool present = std::any_of(atoms.begin(), atoms.end(), [&](double a) { return same_atom(a, sigma); });
    if (!present) {
      const std::size_t j = model.add_atom(sigma);
      std::vector<double> f_old;
      model.evaluate(f_old);
      const double alpha = vertex_step(f_old, model.column(j));
      auto& w = model.weights();
      for (double& x : w) x *= (1.0 - alpha);
      w[j] = alpha;
      if (alpha == 0.0) w[j] = 1e-12;
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double& x : w) x /= total;
    }
    double next = model.run_em(config.weight_tol, config.max_weight_iters, f);
    next = prune(next);
    report.log_likelihood_trace.push_back(next / n);
    report.iterations = it;
    const double gain = next - ll;
    ll = next;
    if (gain <= config.fw_tol * std::abs(ll)) {
      report.converged = true;
      std::tie(arg, top) = scorer.best(model.shift(), f);
      break;
    }
    if (it == config.max_fw_iters) std::tie(arg, top) = scorer.best(model.shift(), f);
  }
  report.kkt_residual = top - 1.0;
  report.mixing = MixingDistribution(model.atoms(), model.weights_view());
  return report;
}

}  // namespace scalemix
