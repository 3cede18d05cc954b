#include "scalemix/verify_theory.hpp"

#include <algorithm>
#include <cmath>

#include "scalemix/error.hpp"
#include "scalemix/normal.hpp"
#include "scalemix/quadrature.hpp"
#include "scalemix/report_io.hpp"

namespace scalemix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBreakMultiples[] = {-40, -20, -10, -6, -4, -3, -2, -1, -0.5, 0,
                                      0.5, 1,   2,   3,  4,  6,  10, 20, 40};
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Linear-space density; values that underflow contribute nothing measurable
// to the Hellinger integrand.
struct Density {
  double mu;
  std::vector<double> coef, half_prec;

  explicit Density(const LocationScaleMixture& m) : mu(m.mu) {
    if (m.mixing.has_zero_atom()) throw Error("hellinger_sq: degenerate mixture (atom at zero scale)");
    for (std::size_t j = 0; j < m.mixing.size(); ++j) {
      const double s = m.mixing.atoms()[j];
      coef.push_back(m.mixing.weights()[j] / (s * kSqrt2Pi));
      half_prec.push_back(0.5 / (s * s));
    }
  }
  double operator()(double x) const {
    const double d2 = (x - mu) * (x - mu);
    double f = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) f += coef[j] * std::exp(-d2 * half_prec[j]);
    return f;
  }
};

// P(N(0, s^2) in [a, b]); a point mass for s == 0.
double interval_prob(double a, double b, double s) {
  if (s == 0.0) return (a <= 0.0 && 0.0 <= b) ? 1.0 : 0.0;
  return standard_normal_cdf(b / s) - standard_normal_cdf(a / s);
}

}  // namespace

HellingerResult hellinger_sq(const LocationScaleMixture& m1, const LocationScaleMixture& m2, double tol) {
  const Density f1(m1), f2(m2);
  const LocationScaleMixture* ms[] = {&m1, &m2};
  double lo = kInf, hi = -kInf;
  for (const auto* m : ms) {
    lo = std::min(lo, m->mu - 40.0 * m->mixing.max_atom());
    hi = std::max(hi, m->mu + 40.0 * m->mixing.max_atom());
  }
  std::vector<double> breaks{lo, hi};
  for (const auto* m : ms)
    for (double s : m->mixing.atoms())
      for (double c : kBreakMultiples) {
        const double x = m->mu + c * s;
        if (x > lo && x < hi) breaks.push_back(x);
      }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const auto integrand = [&](double x) {
    const double d = std::sqrt(f1(x)) - std::sqrt(f2(x));
    return d * d;
  };
  const QuadratureResult q = adaptive_simpson_piecewise(integrand, breaks, tol);

  // (sqrt f1 - sqrt f2)^2 <= f1 + f2; each tail is bounded by its envelope.
  double tail = 0.0;
  for (const auto* m : ms) {
    const double smax = m->mixing.max_atom(), smin = m->mixing.min_atom();
    const double r = std::min(m->mu - lo, hi - m->mu);
    tail += smax / smin * kSqrt2Pi * std::erfc(r / (smax * std::sqrt(2.0)));
  }
  return {std::clamp(q.value, 0.0, 2.0), q.abs_error_estimate + tail, q.panels};
}

InequalityCheck check_symmetrization(double mu1, const MixingDistribution& g1, double mu2,
                                     const MixingDistribution& g2) {
  const HellingerResult lhs = hellinger_sq({mu1, g1}, {mu2, g2});
  const double d = std::abs(mu1 - mu2);
  const HellingerResult sym = hellinger_sq({d, g1}, {-d, g1});
  const double rhs = 0.25 * sym.value;
  const double budget = lhs.abs_error_estimate + 0.25 * sym.abs_error_estimate;
  return {lhs.value, rhs, lhs.value - rhs, budget, lhs.value >= rhs - budget};
}

VariationalTerms variational_lb_terms(double mu, const MixingDistribution& mixing, double delta) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < mixing.size(); ++j) {
    const double s = mixing.atoms()[j], w = mixing.weights()[j];
    // E_P[T] with P = N(mu, s^2) and E_Q[T] with Q = N(0, s^2), T = 1[mu, mu + delta].
    const double ep = interval_prob(0.0, delta, s);
    const double eq = interval_prob(mu, mu + delta, s);
    num += w * (ep - eq);
    den += w * (ep + eq);
  }
  return {num, den};
}

InequalityCheck check_variational_bound(double mu, const MixingDistribution& mixing, double delta) {
  const VariationalTerms v = variational_lb_terms(mu, mixing, delta);
  const double lhs = v.denominator > 0.0 ? v.numerator_root * v.numerator_root / v.denominator : 0.0;
  const HellingerResult h = hellinger_sq({mu, mixing}, {0.0, mixing});
  const double rhs = 2.0 * h.value;
  const double budget = 2.0 * h.abs_error_estimate + 1e-14;
  return {lhs, rhs, rhs - lhs, budget, lhs <= rhs + budget};
}

double modulus_of_continuity(const ModulusQuery& q) {
  if (!(q.t > 0.0 && q.t < 2.0)) throw Error("modulus_of_continuity: t must lie in (0, 2)");
  const auto [lo, hi] = q.bracket;
  if (!(lo >= 0.0 && lo < hi && std::isfinite(hi))) throw Error("modulus_of_continuity: need 0 <= lo < hi < inf");
  const double tol = std::min(1e-10, 1e-5 * q.t);
  auto profile = [&](double d) { return hellinger_sq({d, q.mixing}, {0.0, q.mixing}, tol); };

  constexpr int kProbes = 64;
  std::vector<double> xs(kProbes), hs(kProbes), es(kProbes);
  for (int k = 0; k < kProbes; ++k) {
    xs[k] = (k == kProbes - 1) ? hi : lo + (hi - lo) * k / (kProbes - 1);
    const HellingerResult h = profile(xs[k]);
    hs[k] = h.value;
    es[k] = h.abs_error_estimate;
    if (k > 0 && hs[k] < hs[k - 1] - (es[k] + es[k - 1]) - 1e-12) throw Error("non-monotone profile");
  }
  if (hs.back() <= q.t) return kInf;
  if (hs.front() > q.t) throw Error("modulus_of_continuity: constraint already violated at bracket.lo");
  int k = 1;
  while (hs[k] <= q.t) ++k;
  double a = xs[k - 1], b = xs[k];
  while (b - a > 1e-4 * b) {
    const double m = 0.5 * (a + b);
    if (profile(m).value <= q.t)
      a = m;
    else
      b = m;
  }
  return a;
}

double functional_inequality_rate(double t, double p) {
  const double r = t * t * t / (p * p * p * p);
  return t <= std::pow(p, 4.0 / 3.0) ? std::pow(r, 1.0 / 6.0) : std::sqrt(r);
}

std::vector<FunctionalInequalityRow> check_functional_inequality(const MixingDistribution& mixing, double p,
                                                                 const std::vector<double>& t_grid,
                                                                 const FunctionalInequalityConfig& config) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("check_functional_inequality: p must lie in (0, 1]");
  if (mixing.mass_on(0.0, 1.0) < p - 1e-12) throw Error("check_functional_inequality: G([0, 1]) < p");
  if (!(config.C > 0.0 && config.C_gate > 0.0)) throw Error("check_functional_inequality: constants must be positive");
  const double hi = config.bracket_hi > 0.0 ? config.bracket_hi : 50.0 * mixing.max_atom();
  std::vector<FunctionalInequalityRow> rows;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error("check_functional_inequality: t must be positive");
    if (t > p / config.C_gate || t >= 2.0) {
      rows.push_back({t, kNaN, kNaN, 0, false});
      continue;
    }
    const int regime = t <= std::pow(p, 4.0 / 3.0) ? 1 : 2;
    const double bound = config.C * functional_inequality_rate(t, p);
    const double omega = modulus_of_continuity({mixing, t, {0.0, hi}});
    rows.push_back({t, omega, bound, regime, omega <= bound});
  }
  return rows;
}

std::string verification_csv(const std::vector<VerificationRow>& rows) {
  std::string out = "check,instance_id,lhs,rhs,margin,holds\n";
  for (const auto& r : rows) {
    out += r.check + ',' + std::to_string(r.instance_id) + ',' + format_double(r.lhs) + ',' + format_double(r.rhs) +
           ',' + format_double(r.margin) + ',' + (r.holds ? "true" : "false") + '\n';
  }
  return out;
}

MixingDistribution random_two_atom_prior(double p, CounterRng& rng) {
  const double s = rng.uniform(0.3, 1.0);
  const double big = std::exp(rng.uniform(std::log(2.0), std::log(1000.0)));
  return MixingDistribution({s, big}, {p, 1.0 - p});
}

std::vector<double> inequality_t_grid(double p, double C_gate) {
  const double split = std::pow(p, 4.0 / 3.0);
  const double top = p / C_gate;
  std::vector<double> t{0.01 * split, 0.1 * split, split};
  if (top > split) {
    const double r = top / split;
    t.push_back(split * std::pow(r, 1.0 / 3.0));
    t.push_back(split * std::pow(r, 2.0 / 3.0));
    t.push_back(top);
  }
  t.erase(std::remove_if(t.begin(), t.end(), [](double v) { return !(v < 2.0); }), t.end());
  return t;
}

std::vector<VerificationRow> run_verification_suite(const VerificationSuiteConfig& config) {
  std::vector<VerificationRow> rows;
  int id = 0;
  for (double gap : {0.1, 1.0, 4.0}) {
    for (double s : {1.0, 30.0}) {
      const MixingDistribution g = MixingDistribution::point_mass(s);
      const HellingerResult h = hellinger_sq({gap, g}, {0.0, g});
      const double exact = 2.0 - 2.0 * std::exp(-gap * gap / (8.0 * s * s));
      const double diff = std::abs(h.value - exact);
      rows.push_back({"hellinger_closed_form", id++, h.value, exact, 1e-7 - diff, diff <= 1e-7});
    }
  }

  CounterRng rng = CounterRng::substream(config.seed, 0, 1);
  auto random_mixing = [&] {
    const double w = rng.uniform(0.05, 0.95);
    return MixingDistribution::from_unnormalized({rng.uniform(0.3, 5.0), rng.uniform(0.3, 5.0)}, {w, 1.0 - w});
  };
  for (int k = 0; k < config.symmetrization_instances; ++k) {
    const double mu1 = rng.uniform(-3.0, 3.0), mu2 = rng.uniform(-3.0, 3.0);
    const MixingDistribution g1 = random_mixing(), g2 = random_mixing();
    const InequalityCheck c = check_symmetrization(mu1, g1, mu2, g2);
    rows.push_back({"symmetrization", k, c.lhs, c.rhs, c.margin, c.holds});
  }

  rng = CounterRng::substream(config.seed, 0, 2);
  for (int k = 0; k < config.variational_instances; ++k) {
    const double mu = rng.uniform(-4.0, 4.0);
    const MixingDistribution g = random_mixing();
    const double delta = (k % 10 == 9) ? std::numeric_limits<double>::infinity() : rng.uniform(0.0, 6.0);
    const InequalityCheck c = check_variational_bound(mu, g, delta);
    rows.push_back({"variational_bound", k, c.lhs, c.rhs, c.margin, c.holds});
  }

  rng = CounterRng::substream(config.seed, 0, 3);
  int row_id = 0;
  for (int k = 0; k < config.inequality_priors; ++k) {
    const double p = config.p_values[static_cast<std::size_t>(k) % config.p_values.size()];
    const MixingDistribution g = random_two_atom_prior(p, rng);
    for (const auto& r : check_functional_inequality(g, p, inequality_t_grid(p, config.inequality.C_gate), config.inequality)) {
      if (r.regime == 0) continue;
      rows.push_back({r.regime == 1 ? "functional_inequality_regime1" : "functional_inequality_regime2", row_id++,
                      r.omega, r.bound, r.bound - r.omega, r.holds});
    }
  }
  return rows;
}

}  // namespace scalemix
