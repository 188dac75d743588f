#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cohertest/simulate.hpp"
#include "cohertest/specdens.hpp"
#include "cohertest/spectral.hpp"
#include "cohertest/stats.hpp"

namespace cohertest {

enum class Correction { oracle, estimated, none };

const char* correction_name(Correction c);

struct LssConfig {
  TestFunction f = TestFunction::quadratic();
  Correction correction = Correction::estimated;
  bool two_sided = false;
  double delta = 0.0;                 // grid-thinning exponent
  std::optional<int> lag_truncation;  // default floor(N^{1/4})
  double floor_eps = 1e-6;
  RatioConvention ratio = RatioConvention::m_over_b_plus_one;
};

struct McConfig {
  std::vector<long> n_list;
  double alpha = 2.0 / 3.0;
  double c = 0.5;
  std::optional<int> m_override;  // explicit (M, B) instead of the (alpha, c) rule
  std::optional<int> b_override;
  int reps = 1;
  double level = 0.10;
  DgpSpec dgp;
  LssConfig lss;
  std::uint64_t master_seed = 0;
  int threads = 1;  // parallelism width for the replication loop
};

// Everything one replication produces.
struct RepStats {
  std::vector<double> xi0;  // per grid frequency, ascending
  double xi1 = 0.0;
  Xi2 xi2v;
  double xi3 = 0.0;
  bool lag_window_clamped = false;
  bool failed = false;
  std::string error;
};

std::uint64_t rep_seed(std::uint64_t master_seed, std::uint64_t rep_index);

struct RepConfig {
  long n = 0;
  int m = 0;
  int b = 0;
  DgpSpec dgp;
  LssConfig lss;
};

// Deterministic function of (master_seed, rep_index). Errors from inner
// modules are captured in RepStats::failed rather than thrown.
RepStats run_rep(const RepConfig& config, std::uint64_t master_seed, long rep_index);

// Same replication evaluated under several correction modes at once (the
// panel and spectral work are shared).
std::vector<RepStats> run_rep_modes(const RepConfig& config,
                                    std::span<const Correction> modes,
                                    std::uint64_t master_seed, long rep_index);

struct McRow {
  long n = 0;
  std::string dgp;
  std::string statistic;    // xi1, xi2, xi3
  std::string calibration;  // normal, chi2, gumbel
  double rate = 0.0;        // empirical rejection rate
  int reps = 0;             // replications contributing to the rate
  int failures = 0;
  double wall_seconds = 0.0;
  bool flagged = false;  // >1% failed replications
};

struct McReport {
  std::vector<McRow> rows;
  std::uint64_t master_seed = 0;
};

// Monte Carlo rejection-rate table. Replications run on an OpenMP worker
// pool of config.threads threads; every replication is a pure function of
// (master_seed, rep_index) and results are reduced in rep order, so the
// table is identical for any width.
McReport mc_table(const McConfig& config);

// (1/M) sum_{i != j} |a_i^* D a_j|^2 / ((a_i^* D a_i)(a_j^* D a_j)),
// the deterministic alternative-mean shift Tr H^2/M - 1 for the quadratic.
double tr_h2_minus_1(const Eigen::MatrixXcd& a, const Eigen::VectorXd& d_diag);

// First and second moments of the deterministic equivalent measure under the
// mixed alternative: (1/M) Tr H and (1/M) Tr H^2 + c ((1/M) Tr H)^2.
std::pair<double, double> mu1_moments(const Eigen::MatrixXcd& a,
                                      const Eigen::VectorXd& d_diag, double c);

}  // namespace cohertest
