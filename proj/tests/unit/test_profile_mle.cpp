#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "scalemix/baselines.hpp"
#include "scalemix/error.hpp"
#include "scalemix/profile_mle.hpp"
#include "scalemix/rng.hpp"

using namespace scalemix;

TEST_CASE("estimate_mu_given_g on symmetric data") {
  const std::vector<double> data = {1.0, 3.0, 5.0};
  const double gap = 4.0 / 4999.0;
  CHECK(std::abs(estimate_mu_given_g(data, MixingDistribution::point_mass(1.0), 5000) - 3.0) <= gap);
}

TEST_CASE("estimate_mu_given_g on a single point") {
  const std::vector<double> data = {0.0};
  CHECK(estimate_mu_given_g(data, MixingDistribution::point_mass(2.0), 5000) == 0.0);
}

TEST_CASE("estimate_mu_given_g against a brute-force grid") {
  CounterRng rng(5);
  std::vector<double> data;
  for (int i = 0; i < 2000; ++i) data.push_back(5.0 + rng.normal() * (rng.uniform() < 0.01 ? 1.0 : 30.0));
  const MixingDistribution prior({1.0, 30.0}, {0.01, 0.99});
  const double est = estimate_mu_given_g(data, prior, 5000);

  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const int points = 1000000;
  double arg = *lo, top = -1e300;
  for (int k = 0; k < points; ++k) {
    const double mu = *lo + (*hi - *lo) * k / (points - 1.0);
    const double ll = total_log_likelihood(data, mu, prior);
    if (ll > top) top = ll, arg = mu;
  }
  CHECK(std::abs(est - arg) < 0.1);
}

TEST_CASE("refine_mu_given_g stays inside the data range") {
  const std::vector<double> data = {0.0, 1.0, 2.0};
  const double mu = refine_mu_given_g(data, MixingDistribution::point_mass(1.0), 1.9, 5.0, 1001);
  CHECK(mu >= 0.0);
  CHECK(mu <= 2.0);
  CHECK(mu == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("fit_joint on constant data") {
  const std::vector<double> data(10, 4.25);
  const auto rep = fit_joint(data);
  CHECK(rep.mu_hat == 4.25);
}

TEST_CASE("fit_joint on three points") {
  const std::vector<double> data = {1.0, 2.0, 3.0};
  const auto rep = fit_joint(data);
  CHECK(std::abs(rep.mu_hat - 2.0) < 1e-3);
}

TEST_CASE("fit_joint never ends below its starting point") {
  CounterRng rng(17);
  std::vector<double> data;
  for (int i = 0; i < 400; ++i) data.push_back(1.5 + rng.normal() * (i < 20 ? 0.8 : 1.0 + 50.0 * rng.uniform()));
  const auto rep = fit_joint(data);
  REQUIRE(!rep.outer_trace.empty());
  double best = -1e300;
  for (const auto& s : rep.outer_trace) best = std::max(best, s.log_likelihood);
  CHECK(rep.log_likelihood >= best - 1e-9);
  CHECK(rep.log_likelihood == doctest::Approx(total_log_likelihood(data, rep.mu_hat, rep.mixing_hat)));
  CHECK(std::isnan(rep.likelihood_gap_log));

  const ReferencePair truth{1.5, rep.mixing_hat};
  const auto with_ref = fit_joint(data, {}, &truth);
  CHECK(with_ref.likelihood_gap_log >= -1e-9);
}

TEST_CASE("fit_joint beats the median on subset-of-signals data") {
  // m = sqrt(n) scales in [0.7, 1], the rest in [1, 150], mu = 2
  const int n = 5000;
  const int m = 70;
  double eb_err = 0.0, med_err = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    CounterRng rng = CounterRng::substream(777, n, rep);
    std::vector<double> data;
    for (int i = 0; i < n; ++i) {
      const double s = i < m ? rng.uniform(0.7, 1.0) : rng.uniform(1.0, 150.0);
      data.push_back(2.0 + s * rng.normal());
    }
    eb_err += std::abs(fit_joint(data).mu_hat - 2.0);
    med_err += std::abs(sample_median(data) - 2.0);
  }
  CHECK(eb_err < med_err);
}

TEST_CASE("JointFitConfig validation") {
  JointFitConfig c;
  c.mu_grid_points = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS(fit_joint(std::vector<double>{}), Error);
}
