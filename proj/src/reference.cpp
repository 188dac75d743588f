#include "cohertest/reference.hpp"

#include <cmath>
#include <numbers>

namespace cohertest::reference {

FreqPanel dft_panel(const Panel& panel) {
  FreqPanel freq;
  freq.m = panel.m;
  freq.n = panel.n;
  freq.values.resize(panel.data.size());
  const int n = panel.n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int ch = 0; ch < panel.m; ++ch) {
    const cplx* y = panel.row(ch);
    cplx* out = freq.values.data() + static_cast<size_t>(ch) * n;
    for (int k = 0; k < n; ++k) {
      cplx acc = 0.0;
      for (int t = 0; t < n; ++t) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(t) *
                             static_cast<double>(k) / static_cast<double>(n);
        acc += y[t] * cplx(std::cos(angle), std::sin(angle));
      }
      out[k] = acc * scale;
    }
  }
  return freq;
}

Eigen::MatrixXcd smoothed_periodogram(const FreqPanel& freq, int center, int b) {
  const int m = freq.m;
  const int n = freq.n;
  Eigen::MatrixXcd s_hat = Eigen::MatrixXcd::Zero(m, m);
  for (int off = -b / 2; off <= b / 2; ++off) {
    int bin = (center + off) % n;
    if (bin < 0) bin += n;
    Eigen::VectorXcd xi(m);
    for (int ch = 0; ch < m; ++ch) xi(ch) = freq.at(ch, bin);
    s_hat += xi * xi.adjoint();
  }
  return s_hat / static_cast<double>(b + 1);
}

}  // namespace cohertest::reference
