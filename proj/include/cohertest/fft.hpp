#pragma once

#include "cohertest/types.hpp"

namespace cohertest {

// Unnormalized forward DFT, out[k] = sum_n in[n] e^{-2 pi i n k / n_points}.
// Backed by a cached FFTW plan per length; thread-safe to call concurrently.
// Plans use FFTW_ESTIMATE so repeated runs are bit-identical.
void forward_dft(const cplx* in, cplx* out, int n_points);

}  // namespace cohertest
