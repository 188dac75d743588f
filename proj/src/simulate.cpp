#include "cohertest/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "cohertest/rng.hpp"

namespace cohertest {

void InnovationSpec::validate() const {
  if (kind != InnovKind::gaussian && k <= 0.0)
    throw ConfigError("innovation shape parameter k must be > 0");
}

double InnovationSpec::second_moment() const {
  switch (kind) {
    case InnovKind::gaussian:
      return 1.0;
    case InnovKind::student:
      // E tau with 1/tau ~ Gamma(k/2, k/2): k/(k-2), infinite for k <= 2.
      return k > 2.0 ? k / (k - 2.0) : std::numeric_limits<double>::infinity();
    case InnovKind::kdist:
      return 1.0;  // E tau = 1 for tau ~ Gamma(k, k)
  }
  return 1.0;
}

void DgpSpec::validate() const {
  innovation.validate();
  if (coef_mode == CoefMode::constant && std::abs(phi) >= 1.0)
    throw ConfigError("dgp1 requires |phi| < 1");
  switch (variant) {
    case DgpVariant::dgp1:
      break;
    case DgpVariant::dgp2:
      if (sigma < 0.0 || sigma >= 1.0)
        throw ConfigError("dgp2 requires 0 <= sigma < 1");
      break;
    case DgpVariant::dgp3:
      if (sigma < 0.0) throw ConfigError("dgp3 requires sigma >= 0");
      break;
    case DgpVariant::dgp4:
      if (factor_count < 1) throw ConfigError("dgp4 requires r >= 1");
      if (!std::isfinite(innovation.second_moment()))
        throw ConfigError("dgp4 SNR is undefined for infinite-variance innovations");
      break;
  }
}

const char* DgpSpec::name() const {
  switch (variant) {
    case DgpVariant::dgp1: return "dgp1";
    case DgpVariant::dgp2: return "dgp2";
    case DgpVariant::dgp3: return "dgp3";
    case DgpVariant::dgp4: return "dgp4";
  }
  return "?";
}

Panel gen_innovations(int m, int n, const InnovationSpec& spec, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ConfigError("innovation panel dimensions must be >= 1");
  spec.validate();
  Panel panel(m, n);
  Rng rng(mix_seed(seed, 0x11));
  for (int ch = 0; ch < m; ++ch) {
    cplx* row = panel.row(ch);
    for (int t = 0; t < n; ++t) row[t] = rng.complex_normal();
  }
  if (spec.kind == InnovKind::gaussian) return panel;

  auto draw_tau = [&spec](Rng& rng) {
    if (spec.kind == InnovKind::student) return 1.0 / rng.gamma(spec.k / 2.0, spec.k / 2.0);
    return rng.gamma(spec.k, spec.k);
  };
  Rng tau_rng(mix_seed(seed, 0x22));
  if (spec.shared_tau) {
    // tau_n shared across channels at each time index: channels stay
    // uncorrelated but are no longer independent.
    for (int t = 0; t < n; ++t) {
      const double scale = std::sqrt(draw_tau(tau_rng));
      for (int ch = 0; ch < m; ++ch) panel.at(ch, t) *= scale;
    }
  } else {
    for (int ch = 0; ch < m; ++ch) {
      cplx* row = panel.row(ch);
      for (int t = 0; t < n; ++t) row[t] *= std::sqrt(draw_tau(tau_rng));
    }
  }
  return panel;
}

int arma_burnin(std::span<const double> phi) {
  double max_abs = 0.0;
  for (double p : phi) max_abs = std::max(max_abs, std::abs(p));
  if (max_abs >= 1.0) throw ConfigError("ARMA stationarity requires |phi| < 1");
  return 500 + static_cast<int>(std::ceil(10.0 / (1.0 - max_abs)));
}

Panel gen_arma_panel(int m, int n, std::span<const double> phi,
                     std::span<const double> psi, const Panel& innovations) {
  if (static_cast<int>(phi.size()) != m || static_cast<int>(psi.size()) != m)
    throw ConfigError("coefficient vectors must have one entry per channel");
  const int burnin = arma_burnin(phi);
  if (innovations.m != m || innovations.n != n + burnin)
    throw ConfigError("innovation panel must be m x (n + burn-in)");
  Panel out(m, n);
  for (int ch = 0; ch < m; ++ch) {
    const cplx* eps = innovations.row(ch);
    cplx* y = out.row(ch);
    const double ph = phi[ch];
    const double ps = psi[ch];
    cplx prev_y = 0.0;
    cplx prev_eps = 0.0;
    for (int t = 0; t < burnin; ++t) {
      prev_y = ph * prev_y + eps[t] + ps * prev_eps;
      prev_eps = eps[t];
    }
    for (int t = 0; t < n; ++t) {
      const cplx e = eps[burnin + t];
      prev_y = ph * prev_y + e + ps * prev_eps;
      prev_eps = e;
      y[t] = prev_y;
    }
  }
  return out;
}

Eigen::MatrixXd ar1_mixing_root(int m, double sigma) {
  if (m < 1) throw ConfigError("mixing dimension must be >= 1");
  if (sigma < 0.0 || sigma >= 1.0) throw ConfigError("AR(1) mixing requires 0 <= sigma < 1");
  // Cholesky factor of Sigma_{k,h} = sigma^{|k-h|}/(1-sigma^2) in closed form:
  // the AR(1) state recursion x_k = sigma x_{k-1} + e_k started from its
  // stationary law. Column 0 carries the stationary scale.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  const double stationary = 1.0 / std::sqrt(1.0 - sigma * sigma);
  for (int row = 0; row < m; ++row) {
    a(row, 0) = std::pow(sigma, row) * stationary;
    for (int col = 1; col <= row; ++col) a(row, col) = std::pow(sigma, row - col);
  }
  return a;
}

double arma_variance(double phi, double psi) {
  return (1.0 + psi * psi + 2.0 * phi * psi) / (1.0 - phi * phi);
}

Eigen::MatrixXd dgp4_loadings(const DgpSpec& spec, int m) {
  const int r = spec.factor_count;
  // Gaussian draws rescaled so that
  // sum_m ||lambda_m||^2 E|f|^2 / sum_m E|eps|^2 hits the target SNR exactly
  // (theoretical variances, not sample ones).
  Rng loadings_rng(mix_seed(spec.structure_seed, 0x55));
  Eigen::MatrixXd loadings(m, r);
  for (int ch = 0; ch < m; ++ch)
    for (int j = 0; j < r; ++j) loadings(ch, j) = loadings_rng.normal();

  double signal_power = 0.0;
  for (int ch = 0; ch < m; ++ch)
    for (int j = 0; j < r; ++j)
      signal_power +=
          loadings(ch, j) * loadings(ch, j) * arma_variance(spec.phi, spec.psi);
  const double noise_power =
      m * arma_variance(spec.phi, spec.psi) * spec.innovation.second_moment();
  if (!(signal_power > 0.0)) throw NumericError("dgp4 loadings have zero power");
  const double target = std::pow(10.0, spec.snr_db / 10.0);
  return loadings * std::sqrt(target * noise_power / signal_power);
}

namespace {

Eigen::Map<Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
as_matrix(Panel& panel) {
  return {panel.data.data(), panel.m, panel.n};
}

Panel apply_dgp4(const DgpSpec& spec, const Panel& base, std::uint64_t seed) {
  const int m = base.m;
  const int n = base.n;
  const int r = spec.factor_count;

  // Factor series: an r-channel panel under the same ARMA coefficients.
  std::vector<double> fphi(r, spec.phi), fpsi(r, spec.psi);
  const Panel factor_innov =
      gen_innovations(r, n + arma_burnin(fphi), spec.innovation, mix_seed(seed, 0x44));
  Panel factors = gen_arma_panel(r, n, fphi, fpsi, factor_innov);

  const Eigen::MatrixXd loadings = dgp4_loadings(spec, m);

  Panel out = base;
  auto out_mat = as_matrix(out);
  auto factor_mat = as_matrix(factors);
  out_mat.noalias() += loadings.cast<cplx>() * factor_mat;
  return out;
}

}  // namespace

Panel apply_dgp(const DgpSpec& spec, const Panel& base, std::uint64_t seed) {
  spec.validate();
  switch (spec.variant) {
    case DgpVariant::dgp1:
      return base;
    case DgpVariant::dgp2: {
      const Eigen::MatrixXcd a = ar1_mixing_root(base.m, spec.sigma).cast<cplx>();
      Panel out = base;
      auto mat = as_matrix(out);
      mat = (a.triangularView<Eigen::Lower>() * mat).eval();
      return out;
    }
    case DgpVariant::dgp3: {
      if (spec.sigma == 0.0) return base;
      Rng mix_rng(mix_seed(spec.structure_seed, 0x33));
      Eigen::MatrixXd g(base.m, base.m);
      for (int i = 0; i < base.m; ++i)
        for (int j = 0; j < base.m; ++j) g(i, j) = mix_rng.normal();
      Eigen::MatrixXcd mixer =
          Eigen::MatrixXcd::Identity(base.m, base.m) +
          (spec.sigma / std::sqrt(static_cast<double>(base.m))) * g.cast<cplx>();
      Panel out = base;
      auto mat = as_matrix(out);
      mat = mixer * mat;
      return out;
    }
    case DgpVariant::dgp4:
      return apply_dgp4(spec, base, seed);
  }
  throw ConfigError("unknown DGP variant");
}

SimResult simulate_panel(const DgpSpec& spec, int m, int n, std::uint64_t seed) {
  spec.validate();
  SimResult result;
  result.phi.assign(m, spec.phi);
  result.psi.assign(m, spec.psi);
  if (spec.coef_mode == CoefMode::uniform) {
    Rng coef_rng(mix_seed(seed, 0x66));
    for (int ch = 0; ch < m; ++ch) {
      result.phi[ch] = coef_rng.uniform(-0.5, 0.5);
      result.psi[ch] = coef_rng.uniform(-0.5, 0.5);
    }
  }
  const int burnin = arma_burnin(result.phi);
  const Panel innovations = gen_innovations(m, n + burnin, spec.innovation, seed);
  Panel base = gen_arma_panel(m, n, result.phi, result.psi, innovations);
  result.panel = apply_dgp(spec, base, seed);
  return result;
}

}  // namespace cohertest
