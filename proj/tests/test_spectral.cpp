#include "cohertest/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "cohertest/reference.hpp"
#include "cohertest/rng.hpp"
#include "cohertest/simulate.hpp"
#include "doctest.h"

using namespace cohertest;

namespace {

Panel random_panel(int m, int n, std::uint64_t seed) {
  Panel panel(m, n);
  Rng rng(seed);
  for (auto& v : panel.data) v = rng.complex_normal();
  return panel;
}

}  // namespace

TEST_CASE("dft_panel on known inputs") {
  const int n = 64;
  Panel constant(1, n);
  for (auto& v : constant.data) v = 1.0;
  const FreqPanel fc = dft_panel(constant);
  CHECK(std::abs(fc.at(0, 0) - std::sqrt(static_cast<double>(n))) <= 1e-12);
  for (int k = 1; k < n; ++k) CHECK(std::abs(fc.at(0, k)) <= 1e-12);

  Panel tone(1, n);
  for (int t = 0; t < n; ++t) {
    const double angle = 2.0 * std::numbers::pi * t * 5.0 / n;
    tone.at(0, t) = cplx(std::cos(angle), std::sin(angle));
  }
  const FreqPanel ft = dft_panel(tone);
  CHECK(std::abs(ft.at(0, 5)) == doctest::Approx(8.0).epsilon(1e-12));
  for (int k = 0; k < n; ++k)
    if (k != 5) CHECK(std::abs(ft.at(0, k)) <= 1e-10);
}

TEST_CASE("dft_panel satisfies Parseval and matches the serial reference") {
  const Panel panel = random_panel(6, 200, 11);
  const FreqPanel freq = dft_panel(panel);
  for (int ch = 0; ch < panel.m; ++ch) {
    double time_energy = 0.0, freq_energy = 0.0;
    for (int t = 0; t < panel.n; ++t) time_energy += std::norm(panel.at(ch, t));
    for (int k = 0; k < panel.n; ++k) freq_energy += std::norm(freq.at(ch, k));
    CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-8));
  }

  const FreqPanel ref = reference::dft_panel(panel);
  double max_diff = 0.0;
  for (size_t i = 0; i < freq.values.size(); ++i)
    max_diff = std::max(max_diff, std::abs(freq.values[i] - ref.values[i]));
  CHECK(max_diff <= 1e-10);
}

TEST_CASE("choose_params rule") {
  const ChosenParams a = choose_params(1000, 2.0 / 3.0, 0.5);
  CHECK(a.m == 100);
  CHECK(a.b == 200);
  const ChosenParams b = choose_params(100, 2.0 / 3.0, 0.5);
  CHECK(b.m == 21);
  CHECK(b.b == 42);
  const ChosenParams c = choose_params(2000, 2.0 / 3.0, 0.5);
  CHECK(c.m == 158);
  CHECK(c.b == 316);
  CHECK_THROWS_AS(choose_params(40, 0.9, 0.5), ConfigError);
  // odd explicit override rounds down to the even span the window needs
  CHECK(normalize_even_span(301) == 300);
  CHECK(normalize_even_span(300) == 300);
}

TEST_CASE("build_grid frequencies") {
  const GridSpec g1 = build_grid(12, 2, 0.0);
  CHECK(g1.k_count == 4);
  CHECK(g1.k_prime == 4);
  CHECK(g1.freq_indices == std::vector<int>{0, 3, 6, 9});

  const GridSpec g2 = build_grid(1000, 200, 0.0);
  CHECK(g2.k_prime == 4);
  CHECK(g2.freq_indices == std::vector<int>{0, 201, 402, 603});

  const GridSpec g3 = build_grid(10000, 100, 0.2);
  CHECK(g3.b_prime == 600);
  CHECK(g3.k_prime == 16);

  CHECK_THROWS_AS(build_grid(100, 3, 0.0), ConfigError);
}

TEST_CASE("smoothed periodogram is Hermitian PSD and matches the reference") {
  const Panel panel = random_panel(12, 256, 13);
  const FreqPanel freq = dft_panel(panel);
  const Eigen::MatrixXcd s = smoothed_periodogram(freq, 100, 16);
  CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() == 0.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s, Eigen::EigenvaluesOnly);
  CHECK(solver.eigenvalues().minCoeff() >= -1e-12);

  const Eigen::MatrixXcd ref = reference::smoothed_periodogram(freq, 100, 16);
  CHECK((s - ref).cwiseAbs().maxCoeff() <= 1e-12);

  // window wraps around the frequency edge
  const Eigen::MatrixXcd wrapped = smoothed_periodogram(freq, 2, 16);
  const Eigen::MatrixXcd wrapped_ref = reference::smoothed_periodogram(freq, 2, 16);
  CHECK((wrapped - wrapped_ref).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("white-noise smoothed periodogram has unit mean") {
  const int n = 256, b = 16, reps = 10000;
  double acc = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const Panel panel = random_panel(1, n, 40000 + rep);
    const FreqPanel freq = dft_panel(panel);
    acc += smoothed_periodogram(freq, 64, b)(0, 0).real();
  }
  CHECK(acc / reps == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("conjugate-reversal symmetry of the window") {
  const Panel panel = random_panel(5, 128, 17);
  Panel conj_panel = panel;
  for (auto& v : conj_panel.data) v = std::conj(v);
  const FreqPanel freq = dft_panel(panel);
  const FreqPanel conj_freq = dft_panel(conj_panel);
  for (int k : {10, 37, 64}) {
    const Eigen::MatrixXcd s = smoothed_periodogram(freq, k, 8);
    const Eigen::MatrixXcd s_conj = smoothed_periodogram(conj_freq, 128 - k, 8);
    CHECK((s_conj - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("coherence normalization") {
  Eigen::MatrixXcd diag(2, 2);
  diag << 4.0, 0.0, 0.0, 9.0;
  CHECK((coherence(diag).c_hat - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);

  Eigen::MatrixXcd s(2, 2);
  s << 4.0, 2.0, 2.0, 4.0;
  const CoherenceEstimate est = coherence(s);
  CHECK(est.c_hat(0, 1).real() == doctest::Approx(0.5).epsilon(1e-15));

  Eigen::MatrixXcd unit(2, 2);
  unit << 1.0, cplx(0.3, 0.4), cplx(0.3, -0.4), 1.0;
  CHECK((coherence(unit).c_hat - unit).cwiseAbs().maxCoeff() <= 1e-15);

  Eigen::MatrixXcd degenerate(2, 2);
  degenerate << 1.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(coherence(degenerate), NumericError);
}

TEST_CASE("coherence of a random panel: unit diagonal, exact trace, bounded entries") {
  const Panel panel = random_panel(24, 512, 19);
  const FreqPanel freq = dft_panel(panel);
  const CoherenceEstimate est = coherence(smoothed_periodogram(freq, 33, 48), 33);
  const int m = 24;
  cplx trace = 0.0;
  for (int i = 0; i < m; ++i) {
    CHECK(est.c_hat(i, i) == cplx(1.0, 0.0));
    trace += est.c_hat(i, i);
    for (int j = 0; j < m; ++j) CHECK(std::abs(est.c_hat(i, j)) <= 1.0 + 1e-12);
  }
  CHECK(trace.real() == static_cast<double>(m));
}
