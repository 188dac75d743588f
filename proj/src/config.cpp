#include "cohertest/config.hpp"

#include <set>

namespace cohertest {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for \"" + key + "\"");
  }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key \"" + key + "\" in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for \"" + key + "\" in " + where);
  }
}

InnovationSpec parse_innovation(const json& j) {
  check_keys(j, {"kind", "k", "shared_tau"}, "innovation");
  InnovationSpec spec;
  const std::string kind = get_or<std::string>(j, "kind", "gaussian");
  if (kind == "gaussian") {
    spec.kind = InnovKind::gaussian;
  } else if (kind == "student") {
    spec.kind = InnovKind::student;
    spec.k = require<double>(j, "k", "innovation");
  } else if (kind == "kdist") {
    spec.kind = InnovKind::kdist;
    spec.k = require<double>(j, "k", "innovation");
  } else {
    throw ConfigError("innovation kind must be gaussian, student or kdist");
  }
  spec.shared_tau = get_or<bool>(j, "shared_tau", true);
  spec.validate();
  return spec;
}

}  // namespace

DgpSpec parse_dgp_spec(const json& j) {
  check_keys(j,
             {"variant", "innovation", "coef_mode", "phi", "psi", "sigma",
              "structure_seed", "r", "snr_db"},
             "dgp");
  DgpSpec spec;
  const std::string variant = require<std::string>(j, "variant", "dgp");
  if (variant == "dgp1") spec.variant = DgpVariant::dgp1;
  else if (variant == "dgp2") spec.variant = DgpVariant::dgp2;
  else if (variant == "dgp3") spec.variant = DgpVariant::dgp3;
  else if (variant == "dgp4") spec.variant = DgpVariant::dgp4;
  else throw ConfigError("dgp variant must be dgp1..dgp4");

  if (j.contains("innovation")) spec.innovation = parse_innovation(j.at("innovation"));
  const std::string mode = get_or<std::string>(j, "coef_mode", "constant");
  if (mode == "constant") spec.coef_mode = CoefMode::constant;
  else if (mode == "uniform") spec.coef_mode = CoefMode::uniform;
  else throw ConfigError("coef_mode must be constant or uniform");
  spec.phi = get_or<double>(j, "phi", 0.0);
  spec.psi = get_or<double>(j, "psi", 0.0);
  spec.sigma = get_or<double>(j, "sigma", 0.0);
  spec.structure_seed = get_or<std::uint64_t>(j, "structure_seed", 1);
  spec.factor_count = get_or<int>(j, "r", 1);
  spec.snr_db = get_or<double>(j, "snr_db", 0.0);
  spec.validate();
  return spec;
}

TestFunction parse_test_function(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "quadratic") return TestFunction::quadratic();
    if (name == "log") return TestFunction::log_function();
    throw ConfigError("test function must be quadratic, log, or {\"poly\": [...]}");
  }
  check_keys(j, {"poly"}, "test function");
  const auto coeffs = require<std::vector<double>>(j, "poly", "test function");
  return TestFunction::polynomial(coeffs);
}

LssConfig parse_lss_config(const json& j) {
  check_keys(j,
             {"f", "correction", "two_sided", "delta", "lag_truncation", "floor_eps",
              "ratio_convention"},
             "lss");
  LssConfig config;
  if (j.contains("f")) config.f = parse_test_function(j.at("f"));
  const std::string corr = get_or<std::string>(j, "correction", "estimated");
  if (corr == "oracle") config.correction = Correction::oracle;
  else if (corr == "estimated") config.correction = Correction::estimated;
  else if (corr == "none") config.correction = Correction::none;
  else throw ConfigError("correction must be oracle, estimated or none");
  config.two_sided = get_or<bool>(j, "two_sided", false);
  config.delta = get_or<double>(j, "delta", 0.0);
  if (j.contains("lag_truncation"))
    config.lag_truncation = require<int>(j, "lag_truncation", "lss");
  config.floor_eps = get_or<double>(j, "floor_eps", 1e-6);
  const std::string ratio = get_or<std::string>(j, "ratio_convention", "m_over_b_plus_one");
  if (ratio == "m_over_b_plus_one") config.ratio = RatioConvention::m_over_b_plus_one;
  else if (ratio == "m_over_b") config.ratio = RatioConvention::m_over_b;
  else throw ConfigError("ratio_convention must be m_over_b_plus_one or m_over_b");
  return config;
}

SimulateConfig parse_simulate_config(const json& j) {
  check_keys(j, {"m", "n", "seed", "dgp", "format"}, "simulate config");
  SimulateConfig config;
  config.m = require<int>(j, "m", "simulate config");
  config.n = require<long>(j, "n", "simulate config");
  config.seed = get_or<std::uint64_t>(j, "seed", 0);
  config.dgp = parse_dgp_spec(j.contains("dgp") ? j.at("dgp") : json::object({{"variant", "dgp1"}}));
  config.format = get_or<std::string>(j, "format", "csv");
  if (config.format != "csv" && config.format != "cpnl")
    throw ConfigError("format must be csv or cpnl");
  if (config.m < 1 || config.n < 1) throw ConfigError("panel dimensions must be >= 1");
  return config;
}

TestConfig parse_test_config(const json& j) {
  check_keys(j,
             {"lss", "level", "alpha", "c", "m", "b", "oracle_phi", "oracle_psi"},
             "test config");
  TestConfig config;
  if (j.contains("lss")) config.lss = parse_lss_config(j.at("lss"));
  config.level = get_or<double>(j, "level", 0.10);
  config.alpha = get_or<double>(j, "alpha", 2.0 / 3.0);
  config.c = get_or<double>(j, "c", 0.5);
  if (j.contains("m")) config.m_override = require<int>(j, "m", "test config");
  if (j.contains("b")) config.b_override = require<int>(j, "b", "test config");
  config.oracle_phi = get_or<std::vector<double>>(j, "oracle_phi", {});
  config.oracle_psi = get_or<std::vector<double>>(j, "oracle_psi", {});
  if (config.oracle_phi.size() != config.oracle_psi.size())
    throw ConfigError("oracle_phi and oracle_psi must have equal length");
  if (config.lss.correction == Correction::oracle && config.oracle_phi.empty())
    throw ConfigError("correction=oracle needs oracle_phi/oracle_psi");
  return config;
}

McConfig parse_mc_config(const json& j) {
  check_keys(j,
             {"n_list", "alpha", "c", "m", "b", "reps", "level", "dgp", "lss",
              "master_seed", "threads"},
             "mc config");
  McConfig config;
  config.n_list = require<std::vector<long>>(j, "n_list", "mc config");
  config.alpha = get_or<double>(j, "alpha", 2.0 / 3.0);
  config.c = get_or<double>(j, "c", 0.5);
  if (j.contains("m")) config.m_override = require<int>(j, "m", "mc config");
  if (j.contains("b")) config.b_override = require<int>(j, "b", "mc config");
  config.reps = require<int>(j, "reps", "mc config");
  config.level = get_or<double>(j, "level", 0.10);
  config.dgp = parse_dgp_spec(j.contains("dgp") ? j.at("dgp") : json::object({{"variant", "dgp1"}}));
  if (j.contains("lss")) config.lss = parse_lss_config(j.at("lss"));
  config.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  config.threads = get_or<int>(j, "threads", 1);
  if (config.reps < 1) throw ConfigError("reps must be >= 1");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw ConfigError("level must lie in (0,1)");
  return config;
}

json dgp_spec_to_json(const DgpSpec& spec) {
  json j;
  j["variant"] = spec.name();
  json innov;
  switch (spec.innovation.kind) {
    case InnovKind::gaussian: innov["kind"] = "gaussian"; break;
    case InnovKind::student: innov["kind"] = "student"; innov["k"] = spec.innovation.k; break;
    case InnovKind::kdist: innov["kind"] = "kdist"; innov["k"] = spec.innovation.k; break;
  }
  innov["shared_tau"] = spec.innovation.shared_tau;
  j["innovation"] = innov;
  j["coef_mode"] = spec.coef_mode == CoefMode::constant ? "constant" : "uniform";
  j["phi"] = spec.phi;
  j["psi"] = spec.psi;
  if (spec.variant == DgpVariant::dgp2 || spec.variant == DgpVariant::dgp3)
    j["sigma"] = spec.sigma;
  if (spec.variant == DgpVariant::dgp3 || spec.variant == DgpVariant::dgp4)
    j["structure_seed"] = spec.structure_seed;
  if (spec.variant == DgpVariant::dgp4) {
    j["r"] = spec.factor_count;
    j["snr_db"] = spec.snr_db;
  }
  return j;
}

json mc_config_to_json(const McConfig& config) {
  json j;
  j["n_list"] = config.n_list;
  j["alpha"] = config.alpha;
  j["c"] = config.c;
  if (config.m_override) j["m"] = *config.m_override;
  if (config.b_override) j["b"] = *config.b_override;
  j["reps"] = config.reps;
  j["level"] = config.level;
  j["dgp"] = dgp_spec_to_json(config.dgp);
  json lss;
  lss["f"] = config.lss.f.name() == "poly"
                 ? json{{"poly", config.lss.f.coeffs()}}
                 : json(config.lss.f.name());
  lss["correction"] = correction_name(config.lss.correction);
  lss["two_sided"] = config.lss.two_sided;
  lss["delta"] = config.lss.delta;
  if (config.lss.lag_truncation) lss["lag_truncation"] = *config.lss.lag_truncation;
  lss["floor_eps"] = config.lss.floor_eps;
  lss["ratio_convention"] = config.lss.ratio == RatioConvention::m_over_b_plus_one
                                ? "m_over_b_plus_one"
                                : "m_over_b";
  j["lss"] = lss;
  j["master_seed"] = config.master_seed;
  j["threads"] = config.threads;
  return j;
}

}  // namespace cohertest
