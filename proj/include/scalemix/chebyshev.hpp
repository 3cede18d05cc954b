#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scalemix {

/// h(v) = exp(-K e^{lambda v}) on [-1, 1].
double cheb_target(double K, double lambda, double v);

/// Chebyshev truncation of h with coefficients c_0..c_L.
struct ChebyshevApprox {
  double K = 0.0;
  double lambda = 0.0;
  int degree = 0;
  std::vector<double> coefficients;
  int quadrature_nodes = 0;
  /// max_j |c_j(nodes) - c_j(2 nodes)|, a proxy for the aliasing error.
  double coefficient_error_estimate = 0.0;

  /// sum_j c_j T_j(v), T_j by the three-term recurrence.
  double evaluate(double v) const;
};

/// c_j = (2/pi) int_0^pi h(cos th) cos(j th) dth (half weight for j = 0) by
/// Gauss-Chebyshev quadrature at th_k = pi (k + 1/2) / N. With `nodes` unset,
/// N starts at 8 (L + 1) and doubles until two successive coefficient sets
/// agree to 1e-12. An explicit N must be at least 4 (L + 1).
ChebyshevApprox chebyshev_coefficients(double K, double lambda, int L, std::optional<int> nodes = std::nullopt);

/// max |h(v) - P_L(v)| over v_i = cos(pi i / (probes - 1)); probes >= 1000.
double truncation_sup_error(const ChebyshevApprox& approx, int probe_points = 2000);

/// 2/(rho - 1) rho^{-L} with rho = min(2, 1 + pi / (2 lambda)) (rho = 2 at lambda = 0).
double bernstein_bound(double lambda, int L);

/// ceil(C_deg (log(1/eps) + max(lambda, 1) log(max(lambda, e)/eps))).
int predicted_degree(double lambda, double epsilon, double C_deg = 10.0);

struct DegreeResult {
  double K;
  double lambda;
  double epsilon;
  int L_found;
  int L_pred;
  double bernstein_bound;  ///< at L_found
  double measured_error;   ///< at L_found
};

/// Smallest L with measured truncation error <= epsilon, by doubling and then
/// bisection. Throws "degree cap exceeded" past L = 10000.
DegreeResult minimal_degree(double K, double lambda, double epsilon, double C_deg = 10.0);

/// minimal_degree over the product grid, ordered K, then lambda, then epsilon.
std::vector<DegreeResult> degree_sweep(const std::vector<double>& Ks, const std::vector<double>& lambdas,
                                       const std::vector<double>& epsilons, double C_deg = 10.0);

/// Header `K,lambda,epsilon,L_found,L_pred,bernstein_bound,measured_error`.
std::string degree_sweep_csv(const std::vector<DegreeResult>& rows);

/// t exp(-t^2 x^2 / 2) ~ sum_{i<=L} sum_{j<=i} coef_ij t (log t)^j (log x)^(i-j),
/// obtained from the Chebyshev truncation in v = (2u - u_min - u_max)/lambda,
/// u = log t + log x.
struct SeparableExpansion {
  struct Term {
    int i;
    int j;
    double coefficient;  ///< p~_i binom(i, j)
  };

  std::pair<double, double> t_range;
  std::pair<double, double> x_range;
  int degree = 0;
  double K = 0.0;
  double lambda = 0.0;
  ChebyshevApprox approx;
  std::vector<double> u_poly;  ///< p~_0..p~_L, P_L(v(u)) = sum p~_i u^i
  std::vector<Term> terms;

  double measured_sup_error = 0.0;       ///< vs t exp(-t^2 x^2/2) on the 200 x 200 grid
  double expansion_discrepancy = 0.0;    ///< expanded vs t P_L(v(u)) on the same grid
  double chebyshev_error = 0.0;          ///< truncation_sup_error of approx
  double roundoff_estimate = 0.0;        ///< eps * max sum |terms| * (L + 1)
  double error_bound = 0.0;              ///< t_max * chebyshev_error + roundoff_estimate

  double evaluate(double t, double x) const;
  double evaluate_unexpanded(double t, double x) const;
};

/// Throws when binomial or expanded coefficients overflow, naming the degree.
SeparableExpansion separable_expansion(std::pair<double, double> t_range, std::pair<double, double> x_range, int L);

}  // namespace scalemix
