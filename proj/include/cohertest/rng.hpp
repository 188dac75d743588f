#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "cohertest/types.hpp"

namespace cohertest {

// SplitMix64 avalanche step. Also the seed-derivation primitive: replication
// streams are derived as mix_seed(master, index), so any worker can
// reconstruct the stream of any replication without coordination.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t key, std::uint64_t index) {
  return splitmix64(splitmix64(key) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// xoshiro256++ (Blackman/Vigna), seeded through SplitMix64.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x = splitmix64(x);
      word = x;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Deterministic sampler: all distributions are implemented in-repo so that
// streams are reproducible bit-for-bit for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0,1]; never returns 0 so logs are safe.
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller pair of independent N(0,1) draws.
  void normal_pair(double& z0, double& z1) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  double normal() {
    double z0, z1;
    normal_pair(z0, z1);
    return z0;
  }

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1:
  // independent real and imaginary parts N(0, 1/2).
  cplx complex_normal() {
    double z0, z1;
    normal_pair(z0, z1);
    return cplx(z0, z1) * std::numbers::sqrt2 / 2.0;
  }

  // Gamma(shape, rate) via Marsaglia-Tsang squeeze; shape < 1 handled by the
  // usual boost step gamma(a) = gamma(a+1) * U^{1/a}.
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) throw ConfigError("gamma parameters must be > 0");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + cc * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

 private:
  Xoshiro256pp engine_;
};

}  // namespace cohertest
