#include <omp.h>

#include <chrono>
#include <cstdio>

#include "cohertest/harness.hpp"
#include "cohertest/reference.hpp"
#include "cohertest/rng.hpp"
#include "cohertest/spectral.hpp"

using namespace cohertest;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_it(F&& fn, int repeats) {
  const double t0 = now_seconds();
  for (int i = 0; i < repeats; ++i) fn();
  return (now_seconds() - t0) / repeats;
}

Panel random_panel(int m, int n, std::uint64_t seed) {
  Panel panel(m, n);
  Rng rng(seed);
  for (auto& v : panel.data) v = rng.complex_normal();
  return panel;
}

}  // namespace

int main() {
  const int hw_threads = omp_get_max_threads();
  std::printf("kernel benchmark, %d hardware threads\n\n", hw_threads);

  {
    const int m = 64, n = 1024;
    const Panel panel = random_panel(m, n, 7);
    const double t_ref = time_it([&] { reference::dft_panel(panel); }, 3);
    omp_set_num_threads(1);
    const double t_fft1 = time_it([&] { dft_panel(panel); }, 50);
    omp_set_num_threads(hw_threads);
    const double t_fftp = time_it([&] { dft_panel(panel); }, 50);
    std::printf("dft_panel        M=%d N=%d\n", m, n);
    std::printf("  naive serial reference    %10.3f ms\n", 1e3 * t_ref);
    std::printf("  fft, 1 thread             %10.3f ms\n", 1e3 * t_fft1);
    std::printf("  fft, %d threads            %10.3f ms  (speedup %.2fx over 1 thread)\n\n",
                hw_threads, 1e3 * t_fftp, t_fft1 / t_fftp);
  }

  {
    const int m = 150, b = 300, n = 4096;
    const Panel panel = random_panel(m, n, 8);
    const FreqPanel freq = dft_panel(panel);
    const double t_ref =
        time_it([&] { reference::smoothed_periodogram(freq, 512, b); }, 5);
    omp_set_num_threads(1);
    const double t_1 = time_it([&] { smoothed_periodogram(freq, 512, b); }, 10);
    omp_set_num_threads(hw_threads);
    const double t_p = time_it([&] { smoothed_periodogram(freq, 512, b); }, 10);
    std::printf("smoothed_periodogram  M=%d B=%d\n", m, b);
    std::printf("  serial reference          %10.3f ms\n", 1e3 * t_ref);
    std::printf("  kernel, 1 thread          %10.3f ms\n", 1e3 * t_1);
    std::printf("  kernel, %d threads         %10.3f ms  (speedup %.2fx over 1 thread)\n\n",
                hw_threads, 1e3 * t_p, t_1 / t_p);
  }

  {
    McConfig config;
    config.n_list = {512};
    config.reps = 64;
    config.master_seed = 99;
    config.dgp.phi = 0.1;
    config.dgp.psi = 0.5;
    config.lss.correction = Correction::estimated;
    omp_set_num_threads(hw_threads);
    config.threads = 1;
    const double t_1 = time_it([&] { mc_table(config); }, 1);
    config.threads = hw_threads;
    const double t_p = time_it([&] { mc_table(config); }, 1);
    std::printf("mc_table          N=512 R=64 (replication loop)\n");
    std::printf("  width 1                   %10.3f ms\n", 1e3 * t_1);
    std::printf("  width %d                   %10.3f ms  (speedup %.2fx)\n",
                hw_threads, 1e3 * t_p, t_1 / t_p);
  }
  return 0;
}
