#pragma once

#include <string>

#include "cohertest/harness.hpp"
#include "json.hpp"

// JSON config schemas. Parsing is strict: unknown keys are rejected with a
// ConfigError naming the offending key.

namespace cohertest {

struct SimulateConfig {
  int m = 0;
  long n = 0;
  std::uint64_t seed = 0;
  DgpSpec dgp;
  std::string format = "csv";  // csv | cpnl
};

struct TestConfig {
  LssConfig lss;
  double level = 0.10;
  double alpha = 2.0 / 3.0;
  double c = 0.5;
  std::optional<int> m_override;
  std::optional<int> b_override;
  // Known per-channel coefficients for correction = oracle.
  std::vector<double> oracle_phi;
  std::vector<double> oracle_psi;
};

DgpSpec parse_dgp_spec(const nlohmann::json& j);
LssConfig parse_lss_config(const nlohmann::json& j);
SimulateConfig parse_simulate_config(const nlohmann::json& j);
TestConfig parse_test_config(const nlohmann::json& j);
McConfig parse_mc_config(const nlohmann::json& j);

nlohmann::json dgp_spec_to_json(const DgpSpec& spec);
nlohmann::json mc_config_to_json(const McConfig& config);

TestFunction parse_test_function(const nlohmann::json& j);

}  // namespace cohertest
