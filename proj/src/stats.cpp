#include "cohertest/stats.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace cohertest {

namespace {

void check_hermitian(const Eigen::MatrixXcd& c_hat) {
  const double scale = std::max(1.0, c_hat.cwiseAbs().maxCoeff());
  const double dev = (c_hat - c_hat.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-8 * scale) throw NumericError("matrix is not Hermitian");
}

}  // namespace

double lss(const Eigen::MatrixXcd& c_hat, const TestFunction& f) {
  check_hermitian(c_hat);
  const int m = static_cast<int>(c_hat.rows());
  if (f.has_frobenius_shortcut()) {
    // (1/M) Tr (C - I)^2 = (1/M) ||C||_F^2 - 1, using Tr C = M.
    return c_hat.squaredNorm() / m - 1.0;
  }
  return lss_eigen(c_hat, f);
}

double lss_eigen(const Eigen::MatrixXcd& c_hat, const TestFunction& f) {
  check_hermitian(c_hat);
  const int m = static_cast<int>(c_hat.rows());
  const bool verify = !f.has_frobenius_shortcut();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      c_hat, verify ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("Hermitian eigendecomposition failed");
  if (verify) {
    const double norm = c_hat.norm();
    const double residual =
        (c_hat * solver.eigenvectors() -
         solver.eigenvectors() * solver.eigenvalues().asDiagonal())
            .norm();
    if (residual > 1e-8 * std::max(norm, 1.0))
      throw NumericError("eigendecomposition residual too large");
  }
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += f.eval(solver.eigenvalues()(i));
  return acc / m;
}

double theta(double f_hat, const MpContext& mp, double r_value, const TestFunction& f) {
  const double centering = mp_integral(f, mp.c);
  const double pairing = d_pairing(f, mp.c);
  return f_hat - centering -
         pairing * (r_value * mp.v_n() - 1.0 / (mp.c * static_cast<double>(mp.b)));
}

double xi0(double theta_value, int b, double sigma) {
  if (!(sigma > 0.0)) throw NumericError("degenerate variance: sigma must be > 0");
  return static_cast<double>(b) * theta_value / sigma;
}

double xi1(std::span<const double> xi0_values) {
  if (xi0_values.empty()) throw ConfigError("xi1 needs a nonempty grid");
  double acc = 0.0;
  for (double v : xi0_values) acc += v;
  return acc / std::sqrt(static_cast<double>(xi0_values.size()));
}

Xi2 xi2(std::span<const double> xi0_values) {
  if (xi0_values.empty()) throw ConfigError("xi2 needs a nonempty grid");
  Xi2 out;
  out.k_prime = static_cast<int>(xi0_values.size());
  double sum_sq = 0.0;
  for (double v : xi0_values) sum_sq += v * v;
  out.chi2_form = sum_sq;
  out.normal_form = (sum_sq - out.k_prime) /
                    (std::numbers::sqrt2 * std::sqrt(static_cast<double>(out.k_prime)));
  return out;
}

double xi3(std::span<const double> xi0_values) {
  if (xi0_values.size() < 2) throw ConfigError("xi3 needs K' >= 2 grid frequencies");
  const double k_prime = static_cast<double>(xi0_values.size());
  double max_sq = 0.0;
  for (double v : xi0_values) max_sq = std::max(max_sq, v * v);
  const double centering =
      2.0 * std::log(k_prime) - std::log(std::log(k_prime)) - std::log(std::numbers::pi);
  return 0.5 * (max_sq - centering);
}

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

double log_gamma(double x) { return std::lgamma(x); }

// Regularized upper incomplete gamma Q(a, x), series / continued fraction
// split at x = a + 1.
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw ConfigError("gamma_q requires x >= 0, a > 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // P(a,x) by series, Q = 1 - P.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    return 1.0 - p;
  }
  // Q(a,x) by Lentz's continued fraction.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - log_gamma(a));
}

}  // namespace

double chi2_sf(double x, double df) {
  if (df <= 0.0) throw ConfigError("chi-square df must be > 0");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

double gumbel_sf(double x) {
  // 1 - exp(-exp(-x)), computed without cancellation for large x.
  return -std::expm1(-std::exp(-x));
}

TestOutcome calibrate(double statistic, Calibration calibration, int k_prime,
                      double level, bool two_sided) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0,1)");
  TestOutcome out;
  out.statistic = statistic;
  switch (calibration) {
    case Calibration::normal: {
      const double x = two_sided ? std::abs(statistic) : statistic;
      double p = normal_sf(x);
      if (two_sided) p = std::min(1.0, 2.0 * p);
      out.p_value = p;
      break;
    }
    case Calibration::chi2: {
      if (k_prime < 1) throw ConfigError("chi-square calibration needs K' >= 1");
      out.p_value = chi2_sf(statistic, static_cast<double>(k_prime));
      break;
    }
    case Calibration::gumbel: {
      out.p_value = std::isinf(statistic) && statistic > 0.0 ? 0.0 : gumbel_sf(statistic);
      break;
    }
  }
  out.reject = out.p_value <= level;
  return out;
}

}  // namespace cohertest
