#pragma once

#include "cohertest/spectral.hpp"
#include "cohertest/types.hpp"

// Serial reference implementations of the frequency-domain kernels.
// Straight loops, no FFT, no OpenMP. They exist so the fast paths can be
// checked against something simple, and as the baseline for tools/bench.

namespace cohertest::reference {

FreqPanel dft_panel(const Panel& panel);

Eigen::MatrixXcd smoothed_periodogram(const FreqPanel& freq, int center, int b);

}  // namespace cohertest::reference
