#pragma once

#include <span>
#include <vector>

#include "cohertest/types.hpp"

namespace cohertest {

struct LagWindowSpec {
  int l_max = 1;            // rectangular lag truncation L
  double floor_eps = 1e-6;  // positivity floor, relative to the lag-0 power
};

// L = floor(N^{1/4}), the simulation default.
int default_lag_truncation(long n);

// Biased sample autocovariance r_{m,l} = (1/N) sum_{n} y_{m,n+l} y_{m,n}^*,
// 0 <= l < N; negative lags by Hermitian symmetry.
cplx autocov(const Panel& panel, int channel, int lag);

struct SpectralDensityEstimate {
  double s = 0.0;        // lag-window estimate, clamped from below
  double s_deriv = 0.0;  // derivative w.r.t. nu
  bool clamped = false;  // true when the positivity floor was applied
};

// Precomputes sample autocovariances once per channel, then evaluates the
// lag-window estimator and the cross-channel correction at any frequency.
class LagWindowEstimator {
 public:
  LagWindowEstimator(const Panel& panel, const LagWindowSpec& spec);

  SpectralDensityEstimate at(int channel, double nu) const;

  // r_hat(nu) = ((1/M) sum_m s'_m(nu)/s_m(nu))^2.
  double rhat(double nu) const;

  bool any_clamped() const { return clamp_count_ > 0; }
  long clamp_count() const { return clamp_count_; }

 private:
  int m_;
  int l_max_;
  double floor_eps_;
  std::vector<cplx> acov_;  // m x (L+1), lags 0..L
  mutable long clamp_count_ = 0;
};

SpectralDensityEstimate lag_window_sd(const Panel& panel, int channel, double nu,
                                      const LagWindowSpec& spec);

double rhat(const Panel& panel, double nu, const LagWindowSpec& spec);

// Closed-form ARMA(1,1) spectral density |1 + psi e^{-2 pi i nu}|^2 /
// |1 - phi e^{-2 pi i nu}|^2 (unit innovation variance) and its
// log-derivative d/dnu log s(nu).
double arma_spectral_density(double phi, double psi, double nu);
double arma_log_sd_deriv(double phi, double psi, double nu);

// Exact r_N(nu) for a panel of ARMA(1,1) channels.
double oracle_r(std::span<const double> phi, std::span<const double> psi, double nu);

}  // namespace cohertest
