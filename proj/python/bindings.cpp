#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scalemix/baselines.hpp"
#include "scalemix/chebyshev.hpp"
#include "scalemix/error.hpp"
#include "scalemix/experiment_config.hpp"
#include "scalemix/mixing.hpp"
#include "scalemix/npmle.hpp"
#include "scalemix/profile_mle.hpp"
#include "scalemix/report_io.hpp"
#include "scalemix/sim_harness.hpp"
#include "scalemix/verify_theory.hpp"

namespace py = pybind11;
using namespace scalemix;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict npmle_dict(const NpmleFitReport& r) {
  py::dict d;
  d["atoms"] = vec(r.mixing.atoms());
  d["weights"] = vec(r.mixing.weights());
  d["log_likelihood_trace"] = r.log_likelihood_trace;
  d["kkt_residual"] = r.kkt_residual;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  return d;
}

NpmleConfig npmle_config(int grid_points, int max_fw_iters) {
  NpmleConfig c;
  c.grid_points = grid_points;
  c.max_fw_iters = max_fw_iters;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Profile-likelihood location estimation under Gaussian scale mixtures";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<MixingDistribution>(m, "MixingDistribution")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("atoms"), py::arg("weights"))
      .def_static("point_mass", &MixingDistribution::point_mass, py::arg("sigma"))
      .def_property_readonly("atoms", [](const MixingDistribution& g) { return vec(g.atoms()); })
      .def_property_readonly("weights", [](const MixingDistribution& g) { return vec(g.weights()); })
      .def("mass_on", &MixingDistribution::mass_on, py::arg("lo"), py::arg("hi"))
      .def("second_moment", &MixingDistribution::second_moment)
      .def("__len__", &MixingDistribution::size)
      .def("__repr__", [](const MixingDistribution& g) {
        return "MixingDistribution(" + py::repr(py::cast(vec(g.atoms()))).cast<std::string>() + ", " +
               py::repr(py::cast(vec(g.weights()))).cast<std::string>() + ")";
      });

  m.def("log_mixture_density", &log_mixture_density, py::arg("x"), py::arg("mu"), py::arg("mixing"));
  m.def(
      "total_log_likelihood",
      [](const std::vector<double>& data, double mu, const MixingDistribution& g) {
        return total_log_likelihood(data, mu, g);
      },
      py::arg("data"), py::arg("mu"), py::arg("mixing"));

  m.def(
      "kkt_score",
      [](const MixingDistribution& g, double sigma, const std::vector<double>& r) { return kkt_score(g, sigma, r); },
      py::arg("mixing"), py::arg("sigma"), py::arg("residuals"));
  m.def(
      "fit_npmle",
      [](const std::vector<double>& r, int grid_points, int max_fw_iters) {
        std::optional<NpmleFitReport> rep;
        {
          py::gil_scoped_release release;
          rep.emplace(fit_npmle(r, npmle_config(grid_points, max_fw_iters)));
        }
        return npmle_dict(*rep);
      },
      py::arg("residuals"), py::arg("grid_points") = 5000, py::arg("max_fw_iters") = 200,
      "NPMLE of the scale mixture with the location fixed at zero.");

  m.def(
      "fit_joint",
      [](const std::vector<double>& data, int grid_points, bool warm_start) {
        JointFitConfig c;
        c.mu_grid_points = c.npmle.grid_points = grid_points;
        c.warm_start = warm_start;
        std::optional<JointFitReport> rep;
        {
          py::gil_scoped_release release;
          rep.emplace(fit_joint(data, c));
        }
        py::dict d;
        d["mu_hat"] = rep->mu_hat;
        d["atoms"] = vec(rep->mixing_hat.atoms());
        d["weights"] = vec(rep->mixing_hat.weights());
        d["log_likelihood"] = rep->log_likelihood;
        d["kkt_residual"] = rep->kkt_residual;
        d["iterations"] = rep->iterations;
        d["converged"] = rep->converged;
        return d;
      },
      py::arg("data"), py::arg("grid_points") = 5000, py::arg("warm_start") = false,
      "Joint profile-likelihood fit of (mu, G).");

  m.def("sample_median", [](const std::vector<double>& d) { return sample_median(d); }, py::arg("data"));
  m.def(
      "oracle_linear", [](const std::vector<double>& d, const std::vector<double>& s) { return oracle_linear(d, s); },
      py::arg("data"), py::arg("sigmas"));
  m.def(
      "known_prior_mle",
      [](const std::vector<double>& d, const MixingDistribution& g, int grid_points) {
        return known_prior_mle(d, g, grid_points);
      },
      py::arg("data"), py::arg("prior"), py::arg("grid_points") = 5000);
  m.def(
      "iterative_truncation",
      [](const std::vector<double>& d, double mu0, double B, double shrink, std::optional<int> iterations) {
        IterTruncConfig c{mu0, B, shrink, iterations};
        return iterative_truncation(d, c);
      },
      py::arg("data"), py::arg("mu0") = 1.0, py::arg("B") = 10.0, py::arg("shrink") = 0.5,
      py::arg("iterations") = py::none());

  m.def(
      "simulate",
      [](const std::string& config_json) {
        const ExperimentConfig c = parse_experiment_config(config_json);
        std::optional<ExperimentReport> rep;
        {
          py::gil_scoped_release release;
          rep.emplace(run_experiment(c));
        }
        return report_csv(*rep);
      },
      py::arg("config_json"), "Run an experiment from a JSON config; returns the report CSV.");

  m.def(
      "hellinger_sq",
      [](double mu1, const MixingDistribution& g1, double mu2, const MixingDistribution& g2, double tol) {
        return hellinger_sq({mu1, g1}, {mu2, g2}, tol).value;
      },
      py::arg("mu1"), py::arg("g1"), py::arg("mu2"), py::arg("g2"), py::arg("tol") = 1e-10);
  m.def(
      "modulus_of_continuity",
      [](const MixingDistribution& g, double t, double lo, double hi) {
        return modulus_of_continuity({g, t, {lo, hi}});
      },
      py::arg("mixing"), py::arg("t"), py::arg("lo") = 0.0, py::arg("hi") = 50.0);
  m.def(
      "verify",
      [](std::uint64_t seed, double C) {
        VerificationSuiteConfig c;
        c.seed = seed;
        c.inequality.C = C;
        std::vector<VerificationRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_verification_suite(c);
        }
        return verification_csv(rows);
      },
      py::arg("seed") = 1, py::arg("C") = 100.0, "Run the verification suite; returns its CSV.");

  m.def(
      "chebyshev_coefficients",
      [](double K, double lambda, int L) { return chebyshev_coefficients(K, lambda, L).coefficients; }, py::arg("K"),
      py::arg("lambda_"), py::arg("L"));
  m.def(
      "minimal_degree",
      [](double K, double lambda, double eps) {
        const DegreeResult r = minimal_degree(K, lambda, eps);
        py::dict d;
        d["L_found"] = r.L_found;
        d["L_pred"] = r.L_pred;
        d["bernstein_bound"] = r.bernstein_bound;
        d["measured_error"] = r.measured_error;
        return d;
      },
      py::arg("K"), py::arg("lambda_"), py::arg("epsilon"));
  m.def("bernstein_bound", &bernstein_bound, py::arg("lambda_"), py::arg("L"));
  m.def(
      "separable_expansion",
      [](std::pair<double, double> t_range, std::pair<double, double> x_range, int L) {
        const SeparableExpansion e = separable_expansion(t_range, x_range, L);
        py::dict d;
        d["measured_sup_error"] = e.measured_sup_error;
        d["expansion_discrepancy"] = e.expansion_discrepancy;
        d["error_bound"] = e.error_bound;
        d["terms"] = e.terms.size();
        return d;
      },
      py::arg("t_range"), py::arg("x_range"), py::arg("L"));
}
