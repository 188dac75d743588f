#include "cohertest/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <unordered_map>

namespace cohertest {

namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft on
// caller-owned buffers is. Plans are cached per length and never destroyed.
class PlanCache {
 public:
  fftw_plan get(int n_points) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n_points);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> dummy_in(n_points), dummy_out(n_points);
    fftw_plan plan = fftw_plan_dft_1d(
        n_points, reinterpret_cast<fftw_complex*>(dummy_in.data()),
        reinterpret_cast<fftw_complex*>(dummy_out.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n_points, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<int, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void forward_dft(const cplx* in, cplx* out, int n_points) {
  fftw_plan plan = cache().get(n_points);
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace cohertest
