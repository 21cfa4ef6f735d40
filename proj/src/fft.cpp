#include "dburgers/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "dburgers/errors.hpp"

namespace dburgers::fft {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(const GridSpec& grid, int sign) {
  static std::map<std::tuple<int, int, int>, PlanHandle> cache;
  std::lock_guard lock(plan_mutex());
  const auto key = std::make_tuple(grid.d, grid.n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.get();

  // Plans are made on scratch storage and executed later through the
  // new-array interface, hence FFTW_UNALIGNED.
  std::vector<cplx> scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = grid.d == 1 ? fftw_plan_dft_1d(grid.n, buf, buf, sign, flags)
                               : fftw_plan_dft_2d(grid.n, grid.n, buf, buf, sign, flags);
  if (plan == nullptr) throw Error("fftw plan creation failed");
  cache.emplace(key, PlanHandle(plan));
  return plan;
}

void execute(const GridSpec& grid, std::span<cplx> data, int sign) {
  if (data.size() != grid.size()) throw InvalidArgument("fft: buffer size does not match grid");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(get_plan(grid, sign), buf, buf);
}

}  // namespace

void forward(const GridSpec& grid, std::span<cplx> data) { execute(grid, data, FFTW_FORWARD); }

void backward(const GridSpec& grid, std::span<cplx> data) { execute(grid, data, FFTW_BACKWARD); }

}  // namespace dburgers::fft
