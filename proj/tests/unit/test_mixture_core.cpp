#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "scalemix/error.hpp"
#include "scalemix/mixing.hpp"
#include "scalemix/normal.hpp"
#include "../../src/simd_math.hpp"

using namespace scalemix;

TEST_CASE("standard_normal_cdf") {
  CHECK(standard_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(standard_normal_cdf(8.0) - 1.0) < 1e-12);
  CHECK(std::abs(standard_normal_cdf(1.0) - oracle::phi_cdf(1.0)) < 1e-13);
  CHECK(std::abs(standard_normal_cdf(1.0) - 0.841344746068543) < 1e-13);
  for (double x : {-7.5, -3.0, -0.3, 0.7, 2.5, 5.0})
    CHECK(std::abs(standard_normal_cdf(x) - oracle::phi_cdf(x)) < 1e-13);
  // lower tail keeps relative precision
  CHECK(standard_normal_cdf(-30.0) > 0.0);
  CHECK(standard_normal_cdf(-10.0) == doctest::Approx(7.61985302416047e-24).epsilon(1e-12));
}

TEST_CASE("standard_normal_quantile inverts the cdf") {
  for (double p : {1e-300, 1e-12, 0.001, 0.2, 0.5, 0.8, 0.999, 1.0 - 1e-12}) {
    const double x = standard_normal_quantile(p);
    CHECK(standard_normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(standard_normal_quantile(0.5) == 0.0);
  CHECK(standard_normal_quantile(0.0) == -std::numeric_limits<double>::infinity());
  CHECK(standard_normal_quantile(1.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(standard_normal_quantile(1.5), Error);
}

TEST_CASE("MixingDistribution construction") {
  const MixingDistribution g({2.0, 1.0, 1.0 + 1e-14, 3.0}, {0.25, 0.25, 0.25, 0.25});
  REQUIRE(g.size() == 3);
  CHECK(g.atoms()[0] == doctest::Approx(1.0));
  CHECK(g.weights()[0] == doctest::Approx(0.5));
  CHECK(g.mass_on(0.0, 1.5) == doctest::Approx(0.5));
  CHECK(g.second_moment() == doctest::Approx(0.5 * 1.0 + 0.25 * 4.0 + 0.25 * 9.0));

  const MixingDistribution dropped({1.0, 2.0}, {1.0, 0.0});
  CHECK(dropped.size() == 1);

  CHECK_THROWS_AS(MixingDistribution({1.0}, {0.5}), Error);
  CHECK_THROWS_AS(MixingDistribution({1.0, 2.0}, {1.5, -0.5}), Error);
  CHECK_THROWS_AS(MixingDistribution({-1.0}, {1.0}), Error);
  CHECK_THROWS_AS(MixingDistribution({}, {}), Error);

  const std::vector<double> s = {3.0, 1.0, 3.0, 2.0};
  const auto emp = MixingDistribution::empirical(s);
  REQUIRE(emp.size() == 3);
  CHECK(emp.weights()[2] == doctest::Approx(0.5));
  CHECK(emp.scaled(2.0).max_atom() == doctest::Approx(6.0));
}

TEST_CASE("log_mixture_density examples") {
  const auto d1 = MixingDistribution::point_mass(1.0);
  CHECK(log_mixture_density(0.0, 0.0, d1) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));

  const MixingDistribution half({1.0, 2.0}, {0.5, 0.5});
  const double phi0 = 1.0 / std::sqrt(2.0 * oracle::kPi);
  CHECK(log_mixture_density(0.0, 0.0, half) == doctest::Approx(std::log(0.5 * phi0 + 0.5 * phi0 / 2.0)).epsilon(1e-14));
  CHECK(log_mixture_density(0.0, 0.0, half) == doctest::Approx(-1.2066206056564535).epsilon(1e-14));

  const MixingDistribution g({0.3, 4.0, 17.0}, {0.2, 0.5, 0.3});
  CHECK(log_mixture_density(7.0, 3.0, g) == doctest::Approx(log_mixture_density(4.0, 0.0, g)).epsilon(1e-15));

  // far tail stays finite through the log-sum-exp
  const double far = log_mixture_density(1e4, 0.0, d1);
  CHECK(far == doctest::Approx(-0.5e8 - 0.9189385332046727).epsilon(1e-15));
}

TEST_CASE("log_mixture_density with a zero atom") {
  const MixingDistribution g({0.0, 1.0}, {0.5, 0.5});
  CHECK(log_mixture_density(0.0, 0.0, g) == std::numeric_limits<double>::infinity());
  CHECK(log_mixture_density(1.0, 0.0, g) == doctest::Approx(std::log(0.5) - 0.5 - 0.9189385332046727));
  const auto zero = MixingDistribution::point_mass(0.0);
  CHECK(log_mixture_density(1.0, 0.0, zero) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("total_log_likelihood examples") {
  const auto d1 = MixingDistribution::point_mass(1.0);
  const std::vector<double> one = {0.0};
  const std::vector<double> two = {0.0, 0.0};
  const std::vector<double> pm = {1.0, -1.0};
  CHECK(total_log_likelihood(one, 0.0, d1) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(total_log_likelihood(two, 0.0, d1) == doctest::Approx(-1.8378770664093453).epsilon(1e-14));
  CHECK(total_log_likelihood(pm, 0.0, d1) == doctest::Approx(2.0 * (-0.5 - 0.9189385332046727)).epsilon(1e-14));
  CHECK_THROWS_AS(total_log_likelihood(std::vector<double>{}, 0.0, d1), Error);
}

TEST_CASE("total_log_likelihood matches the per-point sum") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z;
  std::vector<double> data;
  for (int i = 0; i < 3000; ++i) data.push_back(z(gen) * (i % 7 == 0 ? 40.0 : 1.0));
  data.push_back(5e3);  // below the fast path's floor
  data.push_back(-2e4);
  const MixingDistribution g({0.5, 1.0, 3.0, 45.0}, {0.1, 0.4, 0.2, 0.3});
  for (double mu : {0.0, 0.37, -12.0}) {
    long double ref = 0.0L;
    for (double x : data) ref += log_mixture_density(x, mu, g);
    CHECK(total_log_likelihood(data, mu, g) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  }
}

TEST_CASE("exp_floor agrees with std::exp") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-600.0, 709.0);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = u(gen);
    const double ref = std::exp(x);
    worst = std::max(worst, std::abs(detail::exp_floor(x) - ref) / ref);
  }
  CHECK(worst < 4e-16);
  CHECK(detail::exp_floor(0.0) == 1.0);
  CHECK(detail::exp_floor(-1000.0) == doctest::Approx(std::exp(-600.0)));
}
