#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "scalemix/baselines.hpp"
#include "scalemix/error.hpp"

using namespace scalemix;

TEST_CASE("sample_median") {
  CHECK(sample_median(std::vector<double>{1.0, 2.0, 3.0}) == 2.0);
  CHECK(sample_median(std::vector<double>{4.0, 2.0, 3.0, 1.0}) == 2.0);
  CHECK(sample_median(std::vector<double>{5.0}) == 5.0);
  CHECK_THROWS_AS(sample_median(std::vector<double>{}), Error);
}

TEST_CASE("oracle_linear") {
  CHECK(oracle_linear(std::vector<double>{0.0, 10.0}, std::vector<double>{1.0, 1.0}) == 5.0);
  CHECK(oracle_linear(std::vector<double>{0.0, 10.0}, std::vector<double>{1.0, 2.0}) == doctest::Approx(2.0));
  CHECK(oracle_linear(std::vector<double>{7.0}, std::vector<double>{3.0}) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(oracle_linear(std::vector<double>{1.0, 3.0, 50.0}, std::vector<double>{0.0, 0.0, 1.0}) == 2.0);
  CHECK_THROWS_AS(oracle_linear(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), Error);
}

TEST_CASE("known_prior_mle") {
  const std::vector<double> sym = {-2.0, -0.5, 0.5, 2.0};
  CHECK(std::abs(known_prior_mle(sym, MixingDistribution::point_mass(1.0), 5001)) <= 4.0 / 5000.0);

  const std::vector<double> data = {0.3, 1.9, -0.7, 4.2, 2.5, 0.0};
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  const double gap = (4.2 + 0.7) / 4999.0;
  for (double s : {0.5, 2.0, 10.0})
    CHECK(std::abs(known_prior_mle(data, MixingDistribution::point_mass(s), 5000) - mean) <= gap);
}

TEST_CASE("iterative_truncation fixed point") {
  const std::vector<double> data(7, -3.5);
  IterTruncConfig c;
  c.mu0 = -3.5;
  CHECK(iterative_truncation(data, c) == -3.5);
}

TEST_CASE("iterative_truncation matches a hand trace") {
  const std::vector<double> data = {0.0, 0.0, 100.0};
  IterTruncConfig c;
  c.mu0 = 0.0;
  c.B = 1.0;
  c.shrink = 0.5;
  c.iterations = 3;
  double mu = 0.0, r = 1.0;
  for (int t = 0; t < 3; ++t) {
    double s = 0.0;
    for (double x : data) s += std::clamp(x, mu - r, mu + r);
    CHECK(mu + r < 100.0);
    mu = s / 3.0;
    r *= 0.5;
  }
  CHECK(mu == doctest::Approx(7.0 / 36.0).epsilon(1e-15));
  CHECK(iterative_truncation(data, c) == doctest::Approx(mu).epsilon(1e-15));
}

TEST_CASE("IterTruncConfig") {
  IterTruncConfig c;
  CHECK(c.resolved_iterations(100) == static_cast<int>(std::ceil(std::log2(10.0 * 10.0))));
  c.shrink = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.B = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}
