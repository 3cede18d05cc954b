#include "scalemix/experiment_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "scalemix/error.hpp"

namespace scalemix {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw Error(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(where + "." + key + ": wrong type");
  }
}

PriorSpec parse_prior(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw Error("prior: expected an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "subset_of_signals") {
    reject_unknown(j, {"kind", "m_exponent", "m_count", "sigma_lo", "sigma_hi"}, "prior");
    SubsetOfSignals p;
    if (j.contains("m_exponent")) p.m_exponent = j.at("m_exponent").get<double>();
    if (j.contains("m_count")) {
      p.m_count = j.at("m_count").get<double>();
      if (!j.contains("m_exponent")) p.m_exponent.reset();
    }
    read(j, "sigma_lo", p.sigma_lo, "prior");
    read(j, "sigma_hi", p.sigma_hi, "prior");
    return p;
  }
  if (kind == "point_mixture") {
    reject_unknown(j, {"kind", "components"}, "prior");
    PointMixture p;
    if (!j.contains("components") || !j.at("components").is_array())
      throw Error("prior.components: expected an array of {weight, sigma}");
    for (const auto& c : j.at("components")) {
      reject_unknown(c, {"weight", "sigma"}, "prior.components");
      if (!c.contains("weight") || !c.contains("sigma")) throw Error("prior.components: need weight and sigma");
      p.components.emplace_back(c.at("weight").get<double>(), c.at("sigma").get<double>());
    }
    return p;
  }
  if (kind == "equal_variance") {
    reject_unknown(j, {"kind", "sigma"}, "prior");
    EqualVariance p;
    read(j, "sigma", p.sigma, "prior");
    return p;
  }
  if (kind == "quadratic_variance") {
    reject_unknown(j, {"kind", "scale"}, "prior");
    QuadraticVariance p;
    read(j, "scale", p.scale, "prior");
    return p;
  }
  throw Error("prior: unknown kind '" + kind + "'");
}

json prior_to_json(const PriorSpec& prior) {
  if (const auto* p = std::get_if<SubsetOfSignals>(&prior)) {
    json j{{"kind", "subset_of_signals"}, {"sigma_lo", p->sigma_lo}, {"sigma_hi", p->sigma_hi}};
    if (p->m_exponent) j["m_exponent"] = *p->m_exponent;
    if (p->m_count) j["m_count"] = *p->m_count;
    return j;
  }
  if (const auto* p = std::get_if<PointMixture>(&prior)) {
    json comps = json::array();
    for (const auto& [w, s] : p->components) comps.push_back({{"weight", w}, {"sigma", s}});
    return {{"kind", "point_mixture"}, {"components", comps}};
  }
  if (const auto* p = std::get_if<EqualVariance>(&prior)) return {{"kind", "equal_variance"}, {"sigma", p->sigma}};
  const auto& q = std::get<QuadraticVariance>(prior);
  return {{"kind", "quadratic_variance"}, {"scale", q.scale}};
}

NpmleConfig parse_npmle(const json& j) {
  reject_unknown(j,
                 {"grid_points", "init_atom_count", "weight_tol", "fw_tol", "max_fw_iters", "prune_weight",
                  "max_weight_iters", "kkt_tol"},
                 "eb.npmle");
  NpmleConfig c;
  read(j, "grid_points", c.grid_points, "eb.npmle");
  read(j, "init_atom_count", c.init_atom_count, "eb.npmle");
  read(j, "weight_tol", c.weight_tol, "eb.npmle");
  read(j, "fw_tol", c.fw_tol, "eb.npmle");
  read(j, "max_fw_iters", c.max_fw_iters, "eb.npmle");
  read(j, "prune_weight", c.prune_weight, "eb.npmle");
  read(j, "max_weight_iters", c.max_weight_iters, "eb.npmle");
  read(j, "kkt_tol", c.kkt_tol, "eb.npmle");
  return c;
}

JointFitConfig parse_eb(const json& j) {
  reject_unknown(j, {"mu_grid_points", "outer_tol", "max_outer_iters", "warm_start", "refine_mu", "npmle"}, "eb");
  JointFitConfig c;
  read(j, "mu_grid_points", c.mu_grid_points, "eb");
  read(j, "outer_tol", c.outer_tol, "eb");
  read(j, "max_outer_iters", c.max_outer_iters, "eb");
  read(j, "warm_start", c.warm_start, "eb");
  read(j, "refine_mu", c.refine_mu, "eb");
  if (j.contains("npmle")) c.npmle = parse_npmle(j.at("npmle"));
  return c;
}

IterTruncConfig parse_iter_trunc(const json& j) {
  reject_unknown(j, {"mu0", "B", "shrink", "iterations"}, "iter_trunc");
  IterTruncConfig c;
  read(j, "mu0", c.mu0, "iter_trunc");
  read(j, "B", c.B, "iter_trunc");
  read(j, "shrink", c.shrink, "iter_trunc");
  if (j.contains("iterations") && !j.at("iterations").is_null()) c.iterations = j.at("iterations").get<int>();
  return c;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"true_mu", "prior", "n_grid", "replications", "seed", "estimators", "eb", "iter_trunc",
                  "known_prior_grid_points", "retain_raw_errors", "threads"},
                 "config");
  ExperimentConfig c;
  try {
    read(j, "true_mu", c.true_mu, "config");
    if (j.contains("prior")) c.prior = parse_prior(j.at("prior"));
    read(j, "n_grid", c.n_grid, "config");
    read(j, "replications", c.replications, "config");
    read(j, "seed", c.seed, "config");
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& name : j.at("estimators").get<std::vector<std::string>>())
        c.estimators.push_back(parse_estimator(name));
    }
    if (j.contains("eb")) c.eb = parse_eb(j.at("eb"));
    if (j.contains("iter_trunc")) c.iter_trunc = parse_iter_trunc(j.at("iter_trunc"));
    read(j, "known_prior_grid_points", c.known_prior_grid_points, "config");
    read(j, "retain_raw_errors", c.retain_raw_errors, "config");
    read(j, "threads", c.threads, "config");
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string experiment_config_to_json(const ExperimentConfig& c, int indent) {
  json estimators = json::array();
  for (Estimator e : c.estimators) estimators.push_back(std::string(estimator_name(e)));
  const auto& n = c.eb.npmle;
  json j{
      {"true_mu", c.true_mu},
      {"prior", prior_to_json(c.prior)},
      {"n_grid", c.n_grid},
      {"replications", c.replications},
      {"seed", c.seed},
      {"estimators", estimators},
      {"eb",
       {{"mu_grid_points", c.eb.mu_grid_points},
        {"outer_tol", c.eb.outer_tol},
        {"max_outer_iters", c.eb.max_outer_iters},
        {"warm_start", c.eb.warm_start},
        {"refine_mu", c.eb.refine_mu},
        {"npmle",
         {{"grid_points", n.grid_points},
          {"init_atom_count", n.init_atom_count},
          {"weight_tol", n.weight_tol},
          {"fw_tol", n.fw_tol},
          {"max_fw_iters", n.max_fw_iters},
          {"prune_weight", n.prune_weight},
          {"max_weight_iters", n.max_weight_iters},
          {"kkt_tol", n.kkt_tol}}}}},
      {"iter_trunc",
       {{"mu0", c.iter_trunc.mu0},
        {"B", c.iter_trunc.B},
        {"shrink", c.iter_trunc.shrink},
        {"iterations", c.iter_trunc.iterations ? json(*c.iter_trunc.iterations) : json(nullptr)}}},
      {"known_prior_grid_points", c.known_prior_grid_points},
      {"retain_raw_errors", c.retain_raw_errors},
      {"threads", c.threads},
  };
  return j.dump(indent);
}

}  // namespace scalemix
