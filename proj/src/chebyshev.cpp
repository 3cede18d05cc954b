#include "scalemix/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scalemix/error.hpp"
#include "scalemix/report_io.hpp"

namespace scalemix {

namespace {

constexpr int kDegreeCap = 10000;
constexpr int kMaxNodes = 1 << 22;

std::vector<double> coefficients_at(double K, double lambda, int L, int N) {
  std::vector<double> c(static_cast<std::size_t>(L) + 1, 0.0);
  for (int k = 0; k < N; ++k) {
    const double x = std::cos(std::numbers::pi * (k + 0.5) / N);
    const double h = cheb_target(K, lambda, x);
    if (h == 0.0) continue;
    double tm = 1.0, t = x;
    c[0] += h;
    if (L >= 1) c[1] += h * x;
    for (int j = 2; j <= L; ++j) {
      const double tn = 2.0 * x * t - tm;
      tm = t;
      t = tn;
      c[static_cast<std::size_t>(j)] += h * t;
    }
  }
  for (auto& v : c) v *= 2.0 / N;
  c[0] *= 0.5;
  return c;
}

// sum (or sum of |.|) of coef (log t)^j (log x)^(i-j) with power tables.
double sum_terms(const std::vector<SeparableExpansion::Term>& terms, int L, double lt, double lx, bool absolute) {
  std::vector<double> pt(static_cast<std::size_t>(L) + 1, 1.0), px(static_cast<std::size_t>(L) + 1, 1.0);
  for (std::size_t k = 1; k < pt.size(); ++k) {
    pt[k] = pt[k - 1] * lt;
    px[k] = px[k - 1] * lx;
  }
  double sum = 0.0;
  for (const auto& term : terms) {
    const double v = term.coefficient * pt[static_cast<std::size_t>(term.j)] * px[static_cast<std::size_t>(term.i - term.j)];
    sum += absolute ? std::abs(v) : v;
  }
  return sum;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

}  // namespace

double cheb_target(double K, double lambda, double v) { return std::exp(-K * std::exp(lambda * v)); }

double ChebyshevApprox::evaluate(double v) const {
  double sum = coefficients[0];
  if (degree == 0) return sum;
  double tm = 1.0, t = v;
  sum += coefficients[1] * v;
  for (int j = 2; j <= degree; ++j) {
    const double tn = 2.0 * v * t - tm;
    tm = t;
    t = tn;
    sum += coefficients[static_cast<std::size_t>(j)] * t;
  }
  return sum;
}

ChebyshevApprox chebyshev_coefficients(double K, double lambda, int L, std::optional<int> nodes) {
  if (!(K >= 0.0) || !std::isfinite(K)) throw Error("chebyshev_coefficients: K must be finite and >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("chebyshev_coefficients: lambda must be >= 0");
  if (L < 0) throw Error("chebyshev_coefficients: L must be >= 0");
  ChebyshevApprox a{K, lambda, L, {}, 0, 0.0};
  if (nodes) {
    if (*nodes < 4 * (L + 1)) throw Error("chebyshev_coefficients: need at least 4(L+1) quadrature nodes");
    a.coefficients = coefficients_at(K, lambda, L, *nodes);
    a.quadrature_nodes = *nodes;
    a.coefficient_error_estimate = max_abs_diff(a.coefficients, coefficients_at(K, lambda, L, 2 * *nodes));
    return a;
  }
  int N = 8 * (L + 1);
  std::vector<double> prev = coefficients_at(K, lambda, L, N);
  for (;;) {
    std::vector<double> next = coefficients_at(K, lambda, L, 2 * N);
    const double diff = max_abs_diff(prev, next);
    if (diff <= 1e-12 || 2 * N >= kMaxNodes) {
      a.coefficients = std::move(prev);
      a.quadrature_nodes = N;
      a.coefficient_error_estimate = diff;
      return a;
    }
    prev = std::move(next);
    N *= 2;
  }
}

double truncation_sup_error(const ChebyshevApprox& approx, int probe_points) {
  if (probe_points < 1000) throw Error("truncation_sup_error: need at least 1000 probe points");
  double worst = 0.0;
  for (int i = 0; i < probe_points; ++i) {
    const double v = std::cos(std::numbers::pi * i / (probe_points - 1));
    worst = std::max(worst, std::abs(cheb_target(approx.K, approx.lambda, v) - approx.evaluate(v)));
  }
  return worst;
}

double bernstein_bound(double lambda, int L) {
  if (!(lambda >= 0.0) || L < 0) throw Error("bernstein_bound: need lambda >= 0 and L >= 0");
  const double rho = lambda == 0.0 ? 2.0 : std::min(2.0, 1.0 + std::numbers::pi / (2.0 * lambda));
  return 2.0 / (rho - 1.0) * std::pow(rho, -static_cast<double>(L));
}

int predicted_degree(double lambda, double epsilon, double C_deg) {
  const double raw = C_deg * (std::log(1.0 / epsilon) +
                              std::max(lambda, 1.0) * std::log(std::max(lambda, std::numbers::e) / epsilon));
  return static_cast<int>(std::ceil(raw));
}

DegreeResult minimal_degree(double K, double lambda, double epsilon, double C_deg) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("minimal_degree: epsilon must lie in (0, 1)");
  auto error_at = [&](int L) {
    const ChebyshevApprox a = chebyshev_coefficients(K, lambda, L);
    return truncation_sup_error(a, std::max(2000, 10 * (L + 1)));
  };
  auto result = [&](int L, double err) {
    return DegreeResult{K, lambda, epsilon, L, predicted_degree(lambda, epsilon, C_deg), bernstein_bound(lambda, L), err};
  };
  double err = error_at(0);
  if (err <= epsilon) return result(0, err);
  int bad = 0, good = 1;
  for (;;) {
    err = error_at(good);
    if (err <= epsilon) break;
    bad = good;
    if (good >= kDegreeCap) throw Error("degree cap exceeded");
    good = std::min(2 * good, kDegreeCap);
  }
  double good_err = err;
  while (good - bad > 1) {
    const int mid = bad + (good - bad) / 2;
    const double e = error_at(mid);
    if (e <= epsilon) {
      good = mid;
      good_err = e;
    } else {
      bad = mid;
    }
  }
  return result(good, good_err);
}

std::vector<DegreeResult> degree_sweep(const std::vector<double>& Ks, const std::vector<double>& lambdas,
                                       const std::vector<double>& epsilons, double C_deg) {
  std::vector<DegreeResult> rows;
  for (double K : Ks)
    for (double lambda : lambdas)
      for (double eps : epsilons) rows.push_back(minimal_degree(K, lambda, eps, C_deg));
  return rows;
}

std::string degree_sweep_csv(const std::vector<DegreeResult>& rows) {
  std::string out = "K,lambda,epsilon,L_found,L_pred,bernstein_bound,measured_error\n";
  for (const auto& r : rows) {
    out += format_double(r.K) + ',' + format_double(r.lambda) + ',' + format_double(r.epsilon) + ',' +
           std::to_string(r.L_found) + ',' + std::to_string(r.L_pred) + ',' + format_double(r.bernstein_bound) + ',' +
           format_double(r.measured_error) + '\n';
  }
  return out;
}

double SeparableExpansion::evaluate(double t, double x) const {
  return t * sum_terms(terms, degree, std::log(t), std::log(x), false);
}

double SeparableExpansion::evaluate_unexpanded(double t, double x) const {
  const double u_min = std::log(t_range.first * x_range.first);
  const double u_max = std::log(t_range.second * x_range.second);
  const double u = std::log(t) + std::log(x);
  const double v = lambda == 0.0 ? 0.0 : (2.0 * u - (u_min + u_max)) / lambda;
  return t * approx.evaluate(v);
}

SeparableExpansion separable_expansion(std::pair<double, double> t_range, std::pair<double, double> x_range, int L) {
  const auto [t_min, t_max] = t_range;
  const auto [x_min, x_max] = x_range;
  if (!(t_min > 0.0 && t_min <= t_max && x_min > 0.0 && x_min <= x_max))
    throw Error("separable_expansion: need 0 < t_min <= t_max and 0 < x_min <= x_max");
  if (L < 0) throw Error("separable_expansion: L must be >= 0");

  SeparableExpansion s;
  s.t_range = t_range;
  s.x_range = x_range;
  s.degree = L;
  s.K = 0.5 * t_min * t_max * x_min * x_max;
  const double u_min = std::log(t_min * x_min), u_max = std::log(t_max * x_max);
  s.lambda = u_max - u_min;
  s.approx = chebyshev_coefficients(s.K, s.lambda, L);
  const auto n = static_cast<std::size_t>(L) + 1;

  // Chebyshev -> monomials in v.
  std::vector<double> mono(n, 0.0);
  {
    std::vector<double> tm(n, 0.0), t(n, 0.0);
    tm[0] = 1.0;
    mono[0] += s.approx.coefficients[0];
    if (L >= 1) {
      t[1] = 1.0;
      mono[1] += s.approx.coefficients[1];
    }
    for (int j = 2; j <= L; ++j) {
      std::vector<double> tn(n, 0.0);
      for (int k = 0; k < j; ++k) tn[static_cast<std::size_t>(k) + 1] += 2.0 * t[static_cast<std::size_t>(k)];
      for (int k = 0; k <= j; ++k) tn[static_cast<std::size_t>(k)] -= tm[static_cast<std::size_t>(k)];
      for (int k = 0; k <= j; ++k) mono[static_cast<std::size_t>(k)] += s.approx.coefficients[static_cast<std::size_t>(j)] * tn[static_cast<std::size_t>(k)];
      tm = std::move(t);
      t = std::move(tn);
    }
  }

  // Pascal triangle, row by row.
  std::vector<std::vector<double>> binom(n);
  for (std::size_t i = 0; i < n; ++i) {
    binom[i].assign(i + 1, 1.0);
    for (std::size_t j = 1; j < i; ++j) binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
    for (double b : binom[i])
      if (!std::isfinite(b)) throw Error("separable_expansion: binomial coefficients overflow at degree " + std::to_string(i));
  }

  // Monomials in v -> monomials in u, v = alpha u + beta.
  s.u_poly.assign(n, 0.0);
  if (s.lambda == 0.0) {
    s.u_poly[0] = s.approx.evaluate(0.0);
  } else {
    const double alpha = 2.0 / s.lambda, beta = -(u_min + u_max) / s.lambda;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k <= i; ++k)
        s.u_poly[k] += mono[i] * binom[i][k] * std::pow(alpha, static_cast<double>(k)) *
                       std::pow(beta, static_cast<double>(i - k));
  }

  for (int i = 0; i <= L; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double c = s.u_poly[static_cast<std::size_t>(i)] * binom[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!std::isfinite(c)) throw Error("separable_expansion: expansion coefficients overflow at degree " + std::to_string(i));
      s.terms.push_back({i, j, c});
    }
  }

  s.chebyshev_error = truncation_sup_error(s.approx, std::max(2000, 10 * (L + 1)));
  constexpr int kGrid = 200;
  double worst_abs_sum = 0.0;
  auto grid_point = [](double lo, double hi, int k) {
    if (lo == hi) return lo;
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (kGrid - 1));
  };
  for (int a = 0; a < kGrid; ++a) {
    const double t = grid_point(t_min, t_max, a);
    for (int b = 0; b < kGrid; ++b) {
      const double x = grid_point(x_min, x_max, b);
      const double expanded = s.evaluate(t, x);
      const double exact = t * std::exp(-0.5 * t * t * x * x);
      s.measured_sup_error = std::max(s.measured_sup_error, std::abs(expanded - exact));
      s.expansion_discrepancy = std::max(s.expansion_discrepancy, std::abs(expanded - s.evaluate_unexpanded(t, x)));
      worst_abs_sum = std::max(worst_abs_sum, t * sum_terms(s.terms, L, std::log(t), std::log(x), true));
    }
  }
  s.roundoff_estimate = worst_abs_sum * std::numeric_limits<double>::epsilon() * (L + 1);
  s.error_bound = t_max * s.chebyshev_error + s.roundoff_estimate;
  return s;
}

}  // namespace scalemix
