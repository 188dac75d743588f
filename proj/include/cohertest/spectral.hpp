#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cohertest/types.hpp"

namespace cohertest {

// Per-channel normalized Fourier transforms evaluated at all Fourier
// frequencies k/N, stored as row-major m x n.
struct FreqPanel {
  int m = 0;
  int n = 0;
  std::vector<cplx> values;

  cplx at(int channel, int bin) const {
    return values[static_cast<size_t>(channel) * n + bin];
  }
  const cplx* row(int channel) const {
    return values.data() + static_cast<size_t>(channel) * n;
  }
};

// xi(k/N) = (1/sqrt(N)) sum_n y_n e^{-2 pi i (n-1) k/N}, one length-N DFT per
// channel. OpenMP-parallel over channels.
FreqPanel dft_panel(const Panel& panel);

struct ChosenParams {
  int m;
  int b;
};

// M = floor(N^alpha), B = floor(M/c) rounded down to the nearest even integer.
ChosenParams choose_params(long n, double alpha, double c);

// The symmetric smoothing window needs an even span; explicit overrides with
// an odd B are rounded down.
inline int normalize_even_span(int b) { return b - (b % 2); }

// Frequency grids. All frequencies are exact Fourier indices (nu = index/N),
// so window extraction is exact bin arithmetic with wraparound.
struct GridSpec {
  long n = 0;
  int b = 0;           // smoothing span, even
  double delta = 0.0;  // grid-thinning exponent
  int b_prime = 0;     // floor(N^delta) * B
  int k_count = 0;     // K  = floor(N/(B+1))
  int k_prime = 0;     // K' = floor(N/(B'+1))
  std::vector<int> freq_indices;  // k*(B'+1), k = 0..K'-1
};

GridSpec build_grid(long n, int b, double delta);

// S_hat(nu) = (1/(B+1)) sum_{b'=-B/2}^{B/2} xi(nu + b'/N) xi(nu + b'/N)^*.
// center is an integer Fourier index; window indices are taken modulo N.
// OpenMP-parallel over the rows of the Hermitian result.
Eigen::MatrixXcd smoothed_periodogram(const FreqPanel& freq, int center, int b);

struct CoherenceEstimate {
  int nu_index = 0;          // frequency as integer Fourier index
  Eigen::MatrixXcd s_hat;    // smoothed periodogram
  Eigen::VectorXd d_hat;     // its diagonal
  Eigen::MatrixXcd c_hat;    // coherence: unit diagonal by construction
};

// C_hat = dg(S)^{-1/2} S dg(S)^{-1/2}. Throws NumericError if any diagonal
// entry of S is <= 0 (degenerate channel, e.g. B+1 < M or an all-zero row).
CoherenceEstimate coherence(Eigen::MatrixXcd s_hat, int nu_index = 0);

}  // namespace cohertest
