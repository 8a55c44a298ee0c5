#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace hlab::detail {

namespace {

struct PlanKey {
  int total_axes;
  int n;
  unsigned long long mask;
  int sign;
  // Plans are only valid for arrays with the same SIMD alignment.
  int alignment;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key, fftw_complex* sample) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<long long> stride(key.total_axes);
    long long s = 1;
    for (int a = key.total_axes - 1; a >= 0; --a) {
      stride[a] = s;
      s *= key.n;
    }
    std::vector<fftw_iodim64> dims;
    std::vector<fftw_iodim64> loops;
    for (int a = 0; a < key.total_axes; ++a) {
      const bool transformed = (key.mask >> a) & 1ULL;
      if (transformed) {
        dims.push_back({key.n, stride[a], stride[a]});
      } else if (!loops.empty() && a > 0 && !((key.mask >> (a - 1)) & 1ULL)) {
        // Merge with the previous untransformed axis: the pair is contiguous
        // in the sense that stride[a-1] = n * stride[a].
        loops.back().n *= key.n;
        loops.back().is = stride[a];
        loops.back().os = stride[a];
      } else {
        loops.push_back({key.n, stride[a], stride[a]});
      }
    }
    fftw_plan plan = fftw_plan_guru64_dft(static_cast<int>(dims.size()), dims.data(),
                                          static_cast<int>(loops.size()), loops.data(), sample,
                                          sample, key.sign, FFTW_ESTIMATE);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_axes(std::span<cplx> data, int total_axes, int n, std::span<const int> axes, int sign) {
  if (axes.empty() || data.empty()) return;
  if (total_axes > 62) throw InvalidArgument("fft_axes: too many axes");
  unsigned long long mask = 0;
  for (int a : axes) {
    if (a < 0 || a >= total_axes) throw InvalidArgument("fft_axes: axis out of range");
    mask |= 1ULL << a;
  }
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = cache().get({total_axes, n, mask, sign, fftw_alignment_of(reinterpret_cast<double*>(ptr))}, ptr);
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace hlab::detail
