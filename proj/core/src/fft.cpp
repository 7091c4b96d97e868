#include "sbadmm/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "sbadmm/errors.hpp"

namespace sbadmm {
namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(GridShape shape, int sign) {
    const auto key = std::make_tuple(shape.height, shape.width, sign);
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    ComplexGrid scratch_in(shape.size()), scratch_out(shape.size());
    fftw_plan plan = fftw_plan_dft_2d(
        static_cast<int>(shape.height), static_cast<int>(shape.width),
        reinterpret_cast<fftw_complex*>(scratch_in.data()),
        reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

ComplexGrid dft2(GridShape shape, std::span<const double> values) {
  if (values.size() != shape.size()) throw ShapeError("dft2: size mismatch");
  ComplexGrid in(values.begin(), values.end());
  ComplexGrid out(shape.size());
  fftw_execute_dft(plan_cache().get(shape, FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> idft2_real(GridShape shape, const ComplexGrid& spectrum) {
  if (spectrum.size() != shape.size()) throw ShapeError("idft2: size mismatch");
  ComplexGrid in = spectrum;
  ComplexGrid out(shape.size());
  fftw_execute_dft(plan_cache().get(shape, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(shape.size());
  std::vector<double> result(shape.size());
  for (std::size_t i = 0; i < result.size(); ++i) {
    result[i] = out[i].real() * scale;
  }
  return result;
}

}  // namespace sbadmm
