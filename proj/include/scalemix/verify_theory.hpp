#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "scalemix/mixing.hpp"
#include "scalemix/rng.hpp"

namespace scalemix {

struct HellingerResult {
  double value;               ///< H^2 = int (sqrt f1 - sqrt f2)^2, in [0, 2]
  double abs_error_estimate;  ///< quadrature estimate plus the analytic tail bound
  int panels_used;
};

/// H^2 by adaptive Simpson over the hull of [mu_k - 40 sigma_max,k, mu_k +
/// 40 sigma_max,k], with breakpoints at mu_k + c sigma_j. Tails outside the
/// hull are bounded through f <= (1/sigma_min) exp(-(x - mu)^2 / (2 sigma_max^2)).
/// Throws for mixtures with an atom at zero (no density).
HellingerResult hellinger_sq(const LocationScaleMixture& m1, const LocationScaleMixture& m2, double tol = 1e-10);

/// Outcome of one numerical inequality check. `margin` is the slack in the
/// direction of the inequality; `holds` allows for `budget` (quadrature error).
struct InequalityCheck {
  double lhs;
  double rhs;
  double margin;
  double budget;
  bool holds;
};

/// lhs = H^2(f_{mu1,G1}, f_{mu2,G2}) >= rhs = (1/4) H^2(f_{|d|,G1}, f_{-|d|,G1}), d = mu1 - mu2.
InequalityCheck check_symmetrization(double mu1, const MixingDistribution& g1, double mu2,
                                     const MixingDistribution& g2);

struct VariationalTerms {
  double numerator_root;  ///< E_G[Phi(D/s) - Phi(0) - Phi((D+mu)/s) + Phi(mu/s)]
  double denominator;     ///< E_G[Phi(D/s) - Phi(0) + Phi((D+mu)/s) - Phi(mu/s)]
};

/// Indicator test function on [mu, mu + delta] applied to f_{mu,G} and f_{0,G}.
/// delta may be +infinity. A zero atom contributes the indicator of its point.
VariationalTerms variational_lb_terms(double mu, const MixingDistribution& mixing, double delta);

/// numerator_root^2 / denominator <= 2 H^2(f_{mu,G}, f_{0,G}).
InequalityCheck check_variational_bound(double mu, const MixingDistribution& mixing, double delta);

struct ModulusQuery {
  MixingDistribution mixing;
  double t;
  std::pair<double, double> bracket;  ///< search interval for the location gap
};

/// Largest gap d in the bracket with H^2(f_{d,G}, f_{0,G}) <= t, to relative
/// precision 1e-4. The profile is first checked to be nondecreasing on 64
/// evenly spaced probes (error "non-monotone profile"). Returns +infinity when
/// even bracket.second satisfies the constraint.
double modulus_of_continuity(const ModulusQuery& query);

/// Two-regime rate: (t^3/p^4)^(1/6) for t <= p^(4/3), (t^3/p^4)^(1/2) above.
double functional_inequality_rate(double t, double p);

struct FunctionalInequalityConfig {
  double C = 100.0;     ///< audited constant multiplying the rate
  double C_gate = 1.0;  ///< rows need t <= p / C_gate
  /// Upper end of the modulus search; 0 means 50 * max atom.
  double bracket_hi = 0.0;
};

struct FunctionalInequalityRow {
  double t;
  double omega;
  double bound;  ///< C * rate
  int regime;    ///< 1: t <= p^(4/3); 2: p^(4/3) < t <= p/C_gate; 0: outside the gate
  bool holds;    ///< omega <= bound; false for out-of-range rows
};

/// Requires G([0, 1]) >= p. Out-of-range rows (t > p / C_gate) are reported
/// with omega and bound NaN and holds = false.
std::vector<FunctionalInequalityRow> check_functional_inequality(const MixingDistribution& mixing, double p,
                                                                 const std::vector<double>& t_grid,
                                                                 const FunctionalInequalityConfig& config = {});

/// One line of a verification report.
struct VerificationRow {
  std::string check;
  int instance_id;
  double lhs;
  double rhs;
  double margin;
  bool holds;
};

/// Header `check,instance_id,lhs,rhs,margin,holds`.
std::string verification_csv(const std::vector<VerificationRow>& rows);

/// Default sweeps behind `scalemix verify` and the acceptance checks.
struct VerificationSuiteConfig {
  std::uint64_t seed = 1;
  int symmetrization_instances = 100;
  int variational_instances = 100;
  int inequality_priors = 20;
  std::vector<double> p_values = {0.01, 0.1, 0.5};
  FunctionalInequalityConfig inequality;
};

/// Random SoS-style two-atom prior p delta_s + (1 - p) delta_L with
/// s ~ Unif[0.3, 1] and log L ~ Unif[log 2, log 1000].
MixingDistribution random_two_atom_prior(double p, CounterRng& rng);

/// Three points in regime 1 (up to p^(4/3)) and three in regime 2 (up to
/// p / C_gate); regime-2 points are omitted when that range is empty.
std::vector<double> inequality_t_grid(double p, double C_gate);

/// Rows: hellinger_closed_form (6 cases), symmetrization, variational_bound,
/// functional_inequality_regime1/2. Out-of-range inequality rows are skipped.
std::vector<VerificationRow> run_verification_suite(const VerificationSuiteConfig& config = {});

}  // namespace scalemix
