#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "cohertest/types.hpp"

namespace cohertest {

enum class InnovKind { gaussian, student, kdist };

struct InnovationSpec {
  InnovKind kind = InnovKind::gaussian;
  double k = 0.0;           // degrees of freedom / shape for student, kdist
  bool shared_tau = true;   // tau_n common across channels (default); false = per-channel tau
  void validate() const;
  // Theoretical E|eps|^2; infinite for student with k <= 2.
  double second_moment() const;
};

enum class CoefMode { constant, uniform };

enum class DgpVariant { dgp1, dgp2, dgp3, dgp4 };

struct DgpSpec {
  DgpVariant variant = DgpVariant::dgp1;
  InnovationSpec innovation;
  CoefMode coef_mode = CoefMode::constant;
  double phi = 0.0;  // constant-mode ARMA(1,1) coefficients, broadcast to all channels
  double psi = 0.0;
  double sigma = 0.0;                 // dgp2 (< 1) / dgp3 (>= 0) mixing strength
  std::uint64_t structure_seed = 1;   // dgp3 mixing matrix, dgp4 factor loadings
  int factor_count = 1;               // dgp4
  double snr_db = 0.0;                // dgp4
  void validate() const;
  const char* name() const;
};

// i.i.d.-across-channel innovations; for heavy-tailed kinds the mixing
// variable tau_n is shared across channels at each time index, so channels
// are uncorrelated but not independent.
Panel gen_innovations(int m, int n, const InnovationSpec& spec, std::uint64_t seed);

// Warm-up samples discarded before an ARMA(1,1) recursion started from zero
// is treated as stationary.
int arma_burnin(std::span<const double> phi);

// Row-wise ARMA(1,1): y[n] - phi y[n-1] = e[n] + psi e[n-1].
// innovations must be m x (n + arma_burnin(phi)); the warm-up is discarded.
Panel gen_arma_panel(int m, int n, std::span<const double> phi,
                     std::span<const double> psi, const Panel& innovations);

// Lower-triangular A with A A^* = Sigma, Sigma_{k,h} = sigma^{|k-h|}/(1-sigma^2).
Eigen::MatrixXd ar1_mixing_root(int m, double sigma);

// Applies the spatial-dependence step of dgp2/dgp3/dgp4 to a base panel
// generated under dgp1. dgp1 returns the base unchanged.
Panel apply_dgp(const DgpSpec& spec, const Panel& base, std::uint64_t seed);

// Theoretical stationary variance of ARMA(1,1) with unit innovation variance.
double arma_variance(double phi, double psi);

// The exact factor loadings dgp4 uses for a given spec and dimension:
// Gaussian draws from structure_seed, rescaled so the theoretical SNR equals
// 10^(snr_db/10).
Eigen::MatrixXd dgp4_loadings(const DgpSpec& spec, int m);

struct SimResult {
  Panel panel;
  std::vector<double> phi;  // per-channel coefficients actually used
  std::vector<double> psi;
};

// One-call generator: draws coefficients (constant or uniform mode),
// innovations, the ARMA base panel, and the DGP-specific mixing step.
SimResult simulate_panel(const DgpSpec& spec, int m, int n, std::uint64_t seed);

}  // namespace cohertest
