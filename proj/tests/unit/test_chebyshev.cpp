#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "scalemix/chebyshev.hpp"
#include "scalemix/error.hpp"

using namespace scalemix;

namespace {

// Trapezoid rule in theta on [0, pi]; spectrally accurate for periodic integrands.
std::vector<double> reference_coefficients(double K, double lambda, int L, int nodes) {
  std::vector<double> c(L + 1, 0.0);
  for (int j = 0; j <= L; ++j) {
    long double acc = 0.0L;
    for (int k = 0; k <= nodes; ++k) {
      const double th = oracle::kPi * k / nodes;
      const double w = (k == 0 || k == nodes) ? 0.5 : 1.0;
      acc += w * std::exp(-K * std::exp(lambda * std::cos(th))) * std::cos(j * th);
    }
    c[j] = static_cast<double>(acc * 2.0L / nodes);
  }
  c[0] *= 0.5;
  return c;
}

}  // namespace

TEST_CASE("chebyshev_coefficients for constant targets") {
  const auto zero = chebyshev_coefficients(0.0, 3.0, 6);
  CHECK(std::abs(zero.coefficients[0] - 1.0) < 1e-12);
  for (int j = 1; j <= 6; ++j) CHECK(std::abs(zero.coefficients[j]) < 1e-12);
  const auto flat = chebyshev_coefficients(2.5, 0.0, 6);
  CHECK(std::abs(flat.coefficients[0] - std::exp(-2.5)) < 1e-12);
  for (int j = 1; j <= 6; ++j) CHECK(std::abs(flat.coefficients[j]) < 1e-12);
  CHECK(truncation_sup_error(zero) < 1e-12);
  CHECK(truncation_sup_error(flat) < 1e-12);
}

TEST_CASE("chebyshev_coefficients against a refined reference") {
  const auto a = chebyshev_coefficients(1.0, 1.0, 20);
  const auto ref = reference_coefficients(1.0, 1.0, 20, 10000);
  REQUIRE(a.coefficients.size() == 21);
  for (int j = 0; j <= 20; ++j) CHECK(std::abs(a.coefficients[j] - ref[j]) < 1e-10);
  CHECK(a.coefficient_error_estimate <= 1e-12);

  const auto fixed = chebyshev_coefficients(1.0, 1.0, 20, 84);
  CHECK(fixed.quadrature_nodes == 84);
  CHECK_THROWS_WITH_AS(chebyshev_coefficients(1.0, 1.0, 20, 83), doctest::Contains("4(L+1)"), Error);
}

TEST_CASE("evaluate reproduces the target at high degree") {
  const auto a = chebyshev_coefficients(3.0, 2.0, 60);
  for (double v : {-1.0, -0.4, 0.0, 0.33, 1.0}) CHECK(std::abs(a.evaluate(v) - cheb_target(3.0, 2.0, v)) < 1e-13);
}

TEST_CASE("bernstein_bound") {
  CHECK(bernstein_bound(0.0, 10) == 0.001953125);
  const double huge = bernstein_bound(1e6, 5);
  CHECK(std::isfinite(huge));
  CHECK(huge > 0.0);
  CHECK(huge > 1e5);
}

TEST_CASE("degree from the Bernstein inversion meets the target") {
  const double eps = 1e-6;
  int L = 0;
  while (bernstein_bound(5.0, L) > eps) ++L;
  const auto a = chebyshev_coefficients(10.0, 5.0, L);
  CHECK(truncation_sup_error(a) <= eps);
}

TEST_CASE("minimal_degree") {
  CHECK(minimal_degree(0.0, 4.0, 1e-6).L_found == 0);
  const auto r = minimal_degree(1.0, 1.0, 1e-6);
  CHECK(r.L_found <= r.L_pred);
  CHECK(r.measured_error <= 1e-6);
  CHECK(r.measured_error <= r.bernstein_bound);
  if (r.L_found > 0) CHECK(truncation_sup_error(chebyshev_coefficients(1.0, 1.0, r.L_found - 1)) > 1e-6);

  const auto base = minimal_degree(1000.0, 20.0, 1e-6);
  const auto scaled = minimal_degree(100000.0, 20.0, 1e-6);
  CHECK(base.L_found <= base.L_pred);
  CHECK(scaled.L_found <= base.L_found);
}

TEST_CASE("degree_sweep ordering and CSV") {
  const auto rows = degree_sweep({1.0, 10.0}, {1.0, 5.0}, {1e-3, 1e-6, 1e-9});
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].K == 1.0);
  CHECK(rows[3].lambda == 5.0);
  for (std::size_t k = 0; k < rows.size(); k += 3) {
    CHECK(rows[k].L_found <= rows[k + 1].L_found);
    CHECK(rows[k + 1].L_found <= rows[k + 2].L_found);
  }
  const std::string csv = degree_sweep_csv(rows);
  CHECK(csv.substr(0, csv.find('\n')) == "K,lambda,epsilon,L_found,L_pred,bernstein_bound,measured_error");
}

TEST_CASE("separable_expansion on a single point") {
  const auto e = separable_expansion({1.0, 1.0}, {1.0, 1.0}, 4);
  CHECK(std::abs(e.evaluate(1.0, 1.0) - std::exp(-0.5)) < 1e-15);
}

TEST_CASE("separable_expansion accuracy") {
  const auto e = separable_expansion({0.5, 2.0}, {0.5, 2.0}, 30);
  CHECK(e.measured_sup_error <= 1e-6);
  CHECK(e.expansion_discrepancy <= 1e-9);
  CHECK(e.measured_sup_error <= e.error_bound + 1e-12);
  for (double t : {0.5, 0.9, 2.0})
    for (double x : {0.5, 1.3, 2.0}) {
      CHECK(std::abs(e.evaluate(t, x) - t * std::exp(-0.5 * t * t * x * x)) < 1e-6);
      CHECK(std::abs(e.evaluate(t, x) - e.evaluate_unexpanded(t, x)) < 1e-9);
    }
}

TEST_CASE("separable degree does not depend on K at fixed lambda") {
  // t in [a, 4a], x in [b, 4b]: lambda = log 16 for every a, b, K = 8 a^2 b^2
  auto degree = [](double a) {
    for (int L = 1;; ++L) {
      const auto e = separable_expansion({a, 4.0 * a}, {1.0, 4.0}, L);
      if (e.chebyshev_error <= 1e-4) return L;
    }
  };
  const double a = 0.25;
  const auto lo = separable_expansion({a, 4.0 * a}, {1.0, 4.0}, 2);
  const auto hi = separable_expansion({a * std::sqrt(10.0), 4.0 * a * std::sqrt(10.0)}, {1.0, 4.0}, 2);
  CHECK(hi.K == doctest::Approx(10.0 * lo.K));
  CHECK(hi.lambda == doctest::Approx(lo.lambda));
  CHECK(std::abs(degree(a) - degree(a * std::sqrt(10.0))) <= 2);
  // over many decades of K the degree stays under one K-free ceiling
  int worst = 0;
  for (double k = 1e-3; k <= 1e6; k *= 10.0) worst = std::max(worst, minimal_degree(k, lo.lambda, 1e-4).L_found);
  CHECK(worst <= predicted_degree(lo.lambda, 1e-4));
}
