#pragma once

#include <Eigen/Dense>
#include <span>

#include "cohertest/rmt.hpp"
#include "cohertest/types.hpp"

namespace cohertest {

// Linear spectral statistic (1/M) sum_k f(lambda_k(C)). Uses the Frobenius
// shortcut for the quadratic, the Hermitian eigendecomposition otherwise.
double lss(const Eigen::MatrixXcd& c_hat, const TestFunction& f);

// Eigendecomposition route regardless of shortcuts (kept for cross-checks).
double lss_eigen(const Eigen::MatrixXcd& c_hat, const TestFunction& f);

// Recentered error term
// theta = f_hat - int f dMP(c) - <D,f> (r v_N - 1/(c B)).
double theta(double f_hat, const MpContext& mp, double r_value, const TestFunction& f);

// Per-frequency standardized statistic B theta / sigma.
double xi0(double theta_value, int b, double sigma);

// (1/sqrt(K')) sum over the grid of xi0.
double xi1(std::span<const double> xi0_values);

struct Xi2 {
  double normal_form = 0.0;  // (1/sqrt(2 K')) sum (xi0^2 - 1)
  double chi2_form = 0.0;    // sum xi0^2, compared against chi^2(K')
  int k_prime = 0;
};

Xi2 xi2(std::span<const double> xi0_values);

// 0.5 (max xi0^2 - (2 log K' - log log K' - log pi)); Gumbel-calibrated.
// Requires K' >= 2.
double xi3(std::span<const double> xi0_values);

enum class Calibration { normal, chi2, gumbel };

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

// p-values from the survival function of the calibration law; reject iff
// p <= level. One-sided by default (reject for large positive statistics).
TestOutcome calibrate(double statistic, Calibration calibration, int k_prime,
                      double level, bool two_sided = false);

// Survival functions used by calibrate.
double normal_sf(double x);
double chi2_sf(double x, double df);
double gumbel_sf(double x);

}  // namespace cohertest
