#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "scalemix/error.hpp"
#include "scalemix/rng.hpp"
#include "scalemix/sim_harness.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = scalemix::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kConfigs = SCALEMIX_SOURCE_DIR "/configs";

}  // namespace

TEST_CASE("read_data") {
  std::istringstream ok("# header\n1.5\n\n  -2e3 \n+4\n");
  CHECK(scalemix::cli::read_data(ok) == std::vector<double>{1.5, -2000.0, 4.0});
  std::istringstream bad("1\n2\nabc\n");
  CHECK_THROWS_WITH_AS(scalemix::cli::read_data(bad), doctest::Contains("line 3"), scalemix::Error);
  std::istringstream partial("1\n2x\n");
  CHECK_THROWS_WITH_AS(scalemix::cli::read_data(partial), doctest::Contains("line 2"), scalemix::Error);
}

TEST_CASE("estimate") {
  oracle::TempDir dir;
  write(dir.path / "d.txt", "1\n2\n3\n");
  const auto r = invoke({"estimate", (dir.path / "d.txt").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j.at("mu_hat").get<double>() - 2.0) < 1e-3);
  for (const char* key : {"atoms", "weights", "log_likelihood", "kkt_residual", "iterations", "converged"})
    CHECK(j.contains(key));

  write(dir.path / "bad.txt", "1\n2\nabc\n");
  const auto bad = invoke({"estimate", (dir.path / "bad.txt").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);

  write(dir.path / "one.txt", "5\n");
  CHECK(invoke({"estimate", (dir.path / "one.txt").string()}).code == 2);
  CHECK(invoke({"estimate", (dir.path / "missing.txt").string()}).code == 2);
}

TEST_CASE("estimate on a subset-of-signals fixture") {
  // generated the same way the harness draws a replication
  scalemix::CounterRng rng = scalemix::CounterRng::substream(7, 2000, 0);
  const auto sigmas = scalemix::sample_sigmas(scalemix::SubsetOfSignals{}, 2000, rng);
  std::ostringstream text;
  text.precision(17);
  for (double s : sigmas) text << 2.0 + s * rng.normal() << "\n";
  oracle::TempDir dir;
  write(dir.path / "sos.txt", text.str());
  const auto r = invoke({"estimate", (dir.path / "sos.txt").string(), "--out", (dir.path / "o").string()});
  REQUIRE(r.code == 0);
  CHECK(std::abs(nlohmann::json::parse(r.out).at("mu_hat").get<double>() - 2.0) < 0.5);
  CHECK(std::filesystem::exists(dir.path / "o" / "estimate.json"));
}

TEST_CASE("simulate") {
  oracle::TempDir dir;
  const auto out = dir.path / "nested" / "run";
  const auto r = invoke({"simulate", "--config", kConfigs + "/sos_sqrt_n.json", "--replications", "2", "--grid-points",
                         "500", "--out", out.string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(out / "report.csv");
  for (const char* e : {"\neb,", "\nmedian,", "\niter_trunc,"}) CHECK(csv.find(e) != std::string::npos);
  CHECK(std::filesystem::exists(out / "report.svg"));
  const auto resolved = nlohmann::json::parse(slurp(out / "config.resolved.json"));
  CHECK(resolved.at("seed").get<std::uint64_t>() == 20240601u);
  CHECK(resolved.at("replications").get<int>() == 2);

  const auto again = invoke({"simulate", "--config", kConfigs + "/sos_sqrt_n.json", "--replications", "2",
                             "--grid-points", "500", "--seed", "20240601", "--out", (dir.path / "b").string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(dir.path / "b" / "report.csv") == csv);

  CHECK(invoke({"simulate", "--config", kConfigs + "/sos_sqrt_n.json", "--replications", "0", "--out",
                (dir.path / "c").string()})
            .code == 2);
  write(dir.path / "typo.json", R"({"replication": 3})");
  const auto typo = invoke({"simulate", "--config", (dir.path / "typo.json").string()});
  CHECK(typo.code == 2);
  CHECK(typo.err.find("replication") != std::string::npos);
}

TEST_CASE("verify") {
  oracle::TempDir dir;
  const auto ok = invoke({"verify", "--out", dir.path.string()});
  CHECK(ok.code == 0);
  CHECK(std::filesystem::exists(dir.path / "verify.csv"));
  const auto bad = invoke({"verify", "--C", "0.0001", "--out", dir.path.string(), "--symmetrization-instances", "2",
                           "--variational-instances", "2"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("failing rows") != std::string::npos);
  CHECK(bad.err.find("functional_inequality") != std::string::npos);
}

TEST_CASE("chebyshev") {
  oracle::TempDir dir;
  const auto r = invoke({"chebyshev", "--out", dir.path.string()});
  CHECK(r.code == 0);
  std::istringstream in(slurp(dir.path / "chebyshev.csv"));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    rows.push_back(v);
  }
  REQUIRE(rows.size() == 48);
  // epsilon decreases within each (K, lambda) block
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k][0] == rows[k - 1][0] && rows[k][1] == rows[k - 1][1]) CHECK(rows[k][3] >= rows[k - 1][3]);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"estimate"}).code == 2);
  CHECK(invoke({"simulate", "--replications", "x", "--config", "a.json"}).code == 2);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(invoke({"simulate", "--help"}).code == 0);
}
