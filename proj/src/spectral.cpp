#include "cohertest/spectral.hpp"

#include <cmath>

#include "cohertest/fft.hpp"

namespace cohertest {

FreqPanel dft_panel(const Panel& panel) {
  FreqPanel freq;
  freq.m = panel.m;
  freq.n = panel.n;
  freq.values.resize(panel.data.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(panel.n));
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < panel.m; ++ch) {
    cplx* out = freq.values.data() + static_cast<size_t>(ch) * panel.n;
    forward_dft(panel.row(ch), out, panel.n);
    for (int k = 0; k < panel.n; ++k) out[k] *= scale;
  }
  return freq;
}

namespace {

// floor with a relative guard so that exact powers like 1000^(2/3) = 100 are
// not lost to the last ulp of pow().
long guarded_floor(double x) { return static_cast<long>(std::floor(x * (1.0 + 1e-12))); }

}  // namespace

ChosenParams choose_params(long n, double alpha, double c) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("c must lie in (0,1)");
  const long m = guarded_floor(std::pow(static_cast<double>(n), alpha));
  if (m < 2) throw ConfigError("choose_params: M < 2, increase N or alpha");
  long b = guarded_floor(static_cast<double>(m) / c);
  b -= b % 2;  // round down to even
  if (b + 1 > n) throw ConfigError("choose_params: B+1 > N");
  return {static_cast<int>(m), static_cast<int>(b)};
}

GridSpec build_grid(long n, int b, double delta) {
  if (b % 2 != 0) throw ConfigError("smoothing span B must be even");
  if (b + 1 > n) throw ConfigError("B+1 must not exceed N");
  if (delta < 0.0) throw ConfigError("delta must be >= 0");
  GridSpec grid;
  grid.n = n;
  grid.b = b;
  grid.delta = delta;
  const long thinning = guarded_floor(std::pow(static_cast<double>(n), delta));
  grid.b_prime = static_cast<int>(thinning * b);
  grid.k_count = static_cast<int>(n / (b + 1));
  grid.k_prime = static_cast<int>(n / (grid.b_prime + 1));
  grid.freq_indices.reserve(grid.k_prime);
  for (int k = 0; k < grid.k_prime; ++k)
    grid.freq_indices.push_back(k * (grid.b_prime + 1));
  return grid;
}

Eigen::MatrixXcd smoothed_periodogram(const FreqPanel& freq, int center, int b) {
  if (b % 2 != 0) throw ConfigError("smoothing span B must be even");
  const int m = freq.m;
  const int n = freq.n;
  const int width = b + 1;

  // Gather the window once so the Gram loop runs on contiguous rows.
  std::vector<cplx> window(static_cast<size_t>(m) * width);
  for (int ch = 0; ch < m; ++ch) {
    const cplx* src = freq.row(ch);
    cplx* dst = window.data() + static_cast<size_t>(ch) * width;
    for (int off = 0; off < width; ++off) {
      int bin = (center - b / 2 + off) % n;
      if (bin < 0) bin += n;
      dst[off] = src[bin];
    }
  }

  // Upper triangle into a row-major scratch: each thread owns whole rows, so
  // writes never share cache lines across threads.
  std::vector<cplx> upper(static_cast<size_t>(m) * m);
  const double scale = 1.0 / width;
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < m; ++i) {
    const cplx* row_i = window.data() + static_cast<size_t>(i) * width;
    cplx* out = upper.data() + static_cast<size_t>(i) * m;
    for (int j = i; j < m; ++j) {
      const cplx* row_j = window.data() + static_cast<size_t>(j) * width;
      double re = 0.0, im = 0.0;
      for (int off = 0; off < width; ++off) {
        const cplx a = row_i[off];
        const cplx bb = row_j[off];
        re += a.real() * bb.real() + a.imag() * bb.imag();
        im += a.imag() * bb.real() - a.real() * bb.imag();
      }
      out[j] = cplx(re * scale, im * scale);
    }
  }

  Eigen::MatrixXcd s_hat(m, m);
  for (int i = 0; i < m; ++i) {
    const cplx* row = upper.data() + static_cast<size_t>(i) * m;
    s_hat(i, i) = cplx(row[i].real(), 0.0);
    for (int j = i + 1; j < m; ++j) {
      s_hat(i, j) = row[j];
      s_hat(j, i) = std::conj(row[j]);
    }
  }
  return s_hat;
}

CoherenceEstimate coherence(Eigen::MatrixXcd s_hat, int nu_index) {
  const int m = static_cast<int>(s_hat.rows());
  CoherenceEstimate est;
  est.nu_index = nu_index;
  est.d_hat.resize(m);
  for (int i = 0; i < m; ++i) {
    const double d = s_hat(i, i).real();
    if (!(d > 0.0))
      throw NumericError("degenerate channel: nonpositive diagonal in S_hat (is B+1 < M, or a channel all zero?)");
    est.d_hat(i) = d;
  }
  Eigen::VectorXd inv_sqrt = est.d_hat.array().rsqrt();
  est.c_hat.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j)
      est.c_hat(i, j) = s_hat(i, j) * (inv_sqrt(i) * inv_sqrt(j));
    est.c_hat(i, i) = 1.0;
  }
  est.s_hat = std::move(s_hat);
  return est;
}

}  // namespace cohertest
