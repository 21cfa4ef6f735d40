#pragma once

#include <complex>
#include <span>

#include "dburgers/grid.hpp"

namespace dburgers {

using cplx = std::complex<double>;

/// In-place complex DFTs on a grid, backed by FFTW plans cached per
/// (d, N, direction). Execution is thread-safe; plan creation is serialized.
namespace fft {

/// data <- sum_j data_j e^{-2 pi i k j / N}, unnormalized.
void forward(const GridSpec& grid, std::span<cplx> data);

/// data <- sum_k data_k e^{+2 pi i k j / N}, unnormalized.
void backward(const GridSpec& grid, std::span<cplx> data);

}  // namespace fft
}  // namespace dburgers
