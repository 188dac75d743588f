#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cohertest {

using cplx = std::complex<double>;

// Bad user input: unknown keys, invalid parameters, impossible dimensions.
// The CLI maps this to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure at run time (degenerate channel, undefined statistic).
// The CLI maps this to exit status 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// M x N complex panel, rows = channels, columns = time samples, row-major.
struct Panel {
  int m = 0;
  int n = 0;
  std::vector<cplx> data;

  Panel() = default;
  Panel(int m_, int n_) : m(m_), n(n_), data(static_cast<size_t>(m_) * n_) {
    if (m_ < 1 || n_ < 1) throw ConfigError("panel dimensions must be >= 1");
  }

  cplx& at(int channel, int t) { return data[static_cast<size_t>(channel) * n + t]; }
  const cplx& at(int channel, int t) const {
    return data[static_cast<size_t>(channel) * n + t];
  }
  cplx* row(int channel) { return data.data() + static_cast<size_t>(channel) * n; }
  const cplx* row(int channel) const {
    return data.data() + static_cast<size_t>(channel) * n;
  }
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cohertest
