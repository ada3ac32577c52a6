#include "fft_backend.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace landau::detail {
namespace {

struct PlanKey {
  std::size_t nrows;
  std::size_t ncols;
  Axis axis;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    // Plan on scratch storage; execution uses the new-array interface.
    const std::size_t total = key.nrows * key.ncols;
    auto* scratch = fftw_alloc_complex(total);
    const int n = static_cast<int>(key.axis == Axis::Rows ? key.ncols : key.nrows);
    const int howmany = static_cast<int>(key.axis == Axis::Rows ? key.nrows : key.ncols);
    const int stride = key.axis == Axis::Rows ? 1 : static_cast<int>(key.ncols);
    const int dist = key.axis == Axis::Rows ? static_cast<int>(key.ncols) : 1;
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, scratch, nullptr, stride, dist, scratch,
                                        nullptr, stride, dist, key.sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_many(std::complex<double>* data, std::size_t nrows, std::size_t ncols, Axis axis,
              int sign) {
  fftw_plan plan = cache().get({nrows, ncols, axis, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD});
  auto* ptr = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace landau::detail
