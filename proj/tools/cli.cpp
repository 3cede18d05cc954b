#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "CLI11.hpp"
#include "json.hpp"
#include "scalemix/chebyshev.hpp"
#include "scalemix/error.hpp"
#include "scalemix/experiment_config.hpp"
#include "scalemix/profile_mle.hpp"
#include "scalemix/report_io.hpp"
#include "scalemix/sim_harness.hpp"
#include "scalemix/verify_theory.hpp"

namespace scalemix::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

struct EstimateOptions {
  std::string data;
  std::string out;
  int grid_points = 0;
  int mu_grid_points = 0;
  int atom_grid_points = 0;
  bool warm_start = false;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  std::ifstream in(o.data);
  if (!in) throw Error("cannot open data file " + o.data);
  const std::vector<double> data = read_data(in);
  if (data.size() < 2) throw Error("need at least 2 observations, got " + std::to_string(data.size()));
  JointFitConfig config;
  if (o.grid_points > 0) config.mu_grid_points = config.npmle.grid_points = o.grid_points;
  if (o.mu_grid_points > 0) config.mu_grid_points = o.mu_grid_points;
  if (o.atom_grid_points > 0) config.npmle.grid_points = o.atom_grid_points;
  config.warm_start = o.warm_start;
  const JointFitReport r = fit_joint(data, config);
  nlohmann::json j{
      {"mu_hat", r.mu_hat},
      {"atoms", std::vector<double>(r.mixing_hat.atoms().begin(), r.mixing_hat.atoms().end())},
      {"weights", std::vector<double>(r.mixing_hat.weights().begin(), r.mixing_hat.weights().end())},
      {"log_likelihood", r.log_likelihood},
      {"kkt_residual", r.kkt_residual},
      {"iterations", r.iterations},
      {"converged", r.converged},
  };
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!o.out.empty()) write_file_atomic(ensure_dir(o.out) / "estimate.json", text);
  return 0;
}

struct SimulateOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> grid_points;
  std::optional<int> threads;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  ExperimentConfig config = load_experiment_config(o.config);
  if (o.seed) config.seed = *o.seed;
  if (o.replications) config.replications = *o.replications;
  if (o.grid_points) {
    config.eb.mu_grid_points = config.eb.npmle.grid_points = *o.grid_points;
    config.known_prior_grid_points = *o.grid_points;
  }
  if (o.threads) config.threads = *o.threads;
  config.validate();
  const ExperimentReport report = run_experiment(config);
  const auto dir = ensure_dir(o.out);
  write_report_csv(report, dir / "report.csv");
  render_error_plot_svg(report, dir / "report.svg");
  write_file_atomic(dir / "config.resolved.json", experiment_config_to_json(config) + "\n");
  out << report_csv(report);
  return 0;
}

struct VerifyOptions {
  std::string out = "out";
  VerificationSuiteConfig suite;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  const std::vector<VerificationRow> rows = run_verification_suite(o.suite);
  write_file_atomic(ensure_dir(o.out) / "verify.csv", verification_csv(rows));
  int failed = 0;
  for (const auto& r : rows) {
    if (r.holds) continue;
    if (failed == 0) err << "failing rows:\n";
    err << "  " << r.check << " #" << r.instance_id << ": lhs=" << format_double(r.lhs)
        << " rhs=" << format_double(r.rhs) << " margin=" << format_double(r.margin) << "\n";
    ++failed;
  }
  out << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size() << " checks hold\n";
  return failed == 0 ? 0 : 1;
}

struct ChebyshevOptions {
  std::string out = "out";
  std::vector<double> Ks = {1e-2, 1.0, 1e2, 1e4};
  std::vector<double> lambdas = {1.0, 5.0, 20.0};
  std::vector<double> epsilons = {1e-2, 1e-4, 1e-6, 1e-8};
  double c_deg = 10.0;
};

int cmd_chebyshev(const ChebyshevOptions& o, std::ostream& out, std::ostream& err) {
  const std::vector<DegreeResult> rows = degree_sweep(o.Ks, o.lambdas, o.epsilons, o.c_deg);
  write_file_atomic(ensure_dir(o.out) / "chebyshev.csv", degree_sweep_csv(rows));
  int failed = 0;
  for (const auto& r : rows) {
    const bool ok = r.measured_error <= r.bernstein_bound && r.L_found <= r.L_pred;
    if (ok) continue;
    if (failed == 0) err << "failing rows:\n";
    err << "  K=" << format_double(r.K) << " lambda=" << format_double(r.lambda)
        << " epsilon=" << format_double(r.epsilon) << ": L_found=" << r.L_found << " L_pred=" << r.L_pred
        << " measured=" << format_double(r.measured_error) << " bernstein=" << format_double(r.bernstein_bound)
        << "\n";
    ++failed;
  }
  out << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size() << " sweep rows within bounds\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

std::vector<double> read_data(std::istream& in) {
  std::vector<double> data;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
      throw Error("line " + std::to_string(number) + ": cannot parse '" + s + "' as a number");
    data.push_back(v);
  }
  return data;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"scalemix: location estimation under heteroskedastic Gaussian noise"};
  app.name("scalemix");
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Fit the profile-likelihood estimator to a data file");
  estimate->add_option("data", est.data, "One number per line; blank and '#' lines ignored")->required();
  estimate->add_option("--out", est.out, "Also write estimate.json to this directory");
  estimate->add_option("--grid-points", est.grid_points, "Location and scale grid size (both)");
  estimate->add_option("--mu-grid-points", est.mu_grid_points, "Location grid size");
  estimate->add_option("--atom-grid-points", est.atom_grid_points, "Scale grid size for atom search");
  estimate->add_flag("--warm-start", est.warm_start, "Warm-start each NPMLE from the previous iterate");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a seeded Monte Carlo experiment from a JSON config");
  simulate->add_option("--config", sim.config, "Experiment config (JSON)")->required();
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Override the config seed");
  simulate->add_option("--replications", sim.replications, "Override the replication count");
  simulate->add_option("--grid-points", sim.grid_points, "Grid size for every location and scale search");
  simulate->add_option("--threads", sim.threads, "Worker threads (results do not depend on it)");

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "Run the Hellinger, symmetrization and modulus checks");
  verify->add_option("--out", ver.out, "Output directory")->capture_default_str();
  verify->add_option("--seed", ver.suite.seed, "Seed for the random instances")->capture_default_str();
  verify->add_option("--C", ver.suite.inequality.C, "Constant multiplying the modulus rate")->capture_default_str();
  verify->add_option("--c-gate", ver.suite.inequality.C_gate, "Rows need t <= p / c_gate")->capture_default_str();
  verify->add_option("--symmetrization-instances", ver.suite.symmetrization_instances)->capture_default_str();
  verify->add_option("--variational-instances", ver.suite.variational_instances)->capture_default_str();
  verify->add_option("--inequality-priors", ver.suite.inequality_priors)->capture_default_str();

  ChebyshevOptions cheb;
  auto* chebyshev = app.add_subcommand("chebyshev", "Degree sweep for exp(-K e^(lambda v)) on [-1, 1]");
  chebyshev->add_option("--out", cheb.out, "Output directory")->capture_default_str();
  chebyshev->add_option("--K", cheb.Ks, "K values")->capture_default_str();
  chebyshev->add_option("--lambda", cheb.lambdas, "lambda values")->capture_default_str();
  chebyshev->add_option("--epsilon", cheb.epsilons, "Target sup errors")->capture_default_str();
  chebyshev->add_option("--c-deg", cheb.c_deg, "Constant in the predicted degree")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*estimate) return cmd_estimate(est, out);
    if (*simulate) return cmd_simulate(sim, out);
    if (*verify) return cmd_verify(ver, out, err);
    if (*chebyshev) return cmd_chebyshev(cheb, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace scalemix::cli
