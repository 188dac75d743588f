#include "cohertest/specdens.hpp"

#include <cmath>
#include <numbers>

namespace cohertest {

int default_lag_truncation(long n) {
  return std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(n), 0.25))));
}

cplx autocov(const Panel& panel, int channel, int lag) {
  const bool negative = lag < 0;
  const int l = std::abs(lag);
  if (l >= panel.n) throw ConfigError("autocovariance lag must satisfy |l| < N");
  const cplx* y = panel.row(channel);
  cplx acc = 0.0;
  for (int t = 0; t + l < panel.n; ++t) acc += y[t + l] * std::conj(y[t]);
  acc /= static_cast<double>(panel.n);
  return negative ? std::conj(acc) : acc;
}

LagWindowEstimator::LagWindowEstimator(const Panel& panel, const LagWindowSpec& spec)
    : m_(panel.m), l_max_(spec.l_max), floor_eps_(spec.floor_eps) {
  if (spec.l_max < 1 || spec.l_max > panel.n - 1)
    throw ConfigError("lag truncation must satisfy 1 <= L <= N-1");
  acov_.resize(static_cast<size_t>(m_) * (l_max_ + 1));
  for (int ch = 0; ch < m_; ++ch)
    for (int l = 0; l <= l_max_; ++l)
      acov_[static_cast<size_t>(ch) * (l_max_ + 1) + l] = autocov(panel, ch, l);
}

SpectralDensityEstimate LagWindowEstimator::at(int channel, double nu) const {
  const cplx* r = acov_.data() + static_cast<size_t>(channel) * (l_max_ + 1);
  // s(nu) = sum_{l=-L}^{L} r_l e^{-2 pi i l nu} with r_{-l} = conj(r_l):
  // real by symmetry, so accumulate the real parts directly.
  double s = r[0].real();
  double deriv = 0.0;
  for (int l = 1; l <= l_max_; ++l) {
    const double angle = -2.0 * std::numbers::pi * l * nu;
    const cplx rot(std::cos(angle), std::sin(angle));
    const cplx term = r[l] * rot;
    s += 2.0 * term.real();
    deriv += 4.0 * std::numbers::pi * l * term.imag();
  }
  SpectralDensityEstimate est;
  const double floor_value = floor_eps_ * r[0].real();
  if (s < floor_value) {
    est.s = floor_value;
    est.clamped = true;
    ++clamp_count_;
  } else {
    est.s = s;
  }
  est.s_deriv = deriv;
  return est;
}

double LagWindowEstimator::rhat(double nu) const {
  double acc = 0.0;
  for (int ch = 0; ch < m_; ++ch) {
    const SpectralDensityEstimate est = at(ch, nu);
    if (!(est.s > 0.0)) throw NumericError("lag-window estimate nonpositive after clamping");
    acc += est.s_deriv / est.s;
  }
  acc /= static_cast<double>(m_);
  return acc * acc;
}

SpectralDensityEstimate lag_window_sd(const Panel& panel, int channel, double nu,
                                      const LagWindowSpec& spec) {
  return LagWindowEstimator(panel, spec).at(channel, nu);
}

double rhat(const Panel& panel, double nu, const LagWindowSpec& spec) {
  return LagWindowEstimator(panel, spec).rhat(nu);
}

double arma_spectral_density(double phi, double psi, double nu) {
  const double cs = std::cos(2.0 * std::numbers::pi * nu);
  const double num = 1.0 + psi * psi + 2.0 * psi * cs;
  const double den = 1.0 + phi * phi - 2.0 * phi * cs;
  return num / den;
}

double arma_log_sd_deriv(double phi, double psi, double nu) {
  const double cs = std::cos(2.0 * std::numbers::pi * nu);
  const double sn = std::sin(2.0 * std::numbers::pi * nu);
  const double num = 1.0 + psi * psi + 2.0 * psi * cs;
  const double den = 1.0 + phi * phi - 2.0 * phi * cs;
  return -4.0 * std::numbers::pi * sn * (psi / num + phi / den);
}

double oracle_r(std::span<const double> phi, std::span<const double> psi, double nu) {
  if (phi.size() != psi.size()) throw ConfigError("phi and psi must have equal length");
  if (phi.empty()) throw ConfigError("oracle_r needs at least one channel");
  double acc = 0.0;
  for (size_t ch = 0; ch < phi.size(); ++ch) {
    if (std::abs(phi[ch]) >= 1.0) throw ConfigError("oracle_r requires |phi| < 1");
    acc += arma_log_sd_deriv(phi[ch], psi[ch], nu);
  }
  acc /= static_cast<double>(phi.size());
  return acc * acc;
}

}  // namespace cohertest
