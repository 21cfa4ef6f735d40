#pragma once

#include <cstdint>
#include <vector>

#include "dburgers/field.hpp"

namespace dburgers {

/// One cosine mode a cos(2 pi k.x / L + phase) of a potential.
struct CosineMode {
  Wavevector k{1, 0};
  double amplitude = 1.0;
  double phase = 0.0;
};

/// Zero-mean random potential phi with c(k) proportional to |k|^{-slope}
/// e^{i theta_k}, theta_k uniform from the seed, supported on |k| <= N/4,
/// scaled so that ||grad phi||_{\dot H^1} = amplitude.
SpectralField random_smooth_potential(const GridSpec& grid, std::uint64_t seed, double amplitude,
                                      double slope);

/// Sum of cosine modes; the k = 0 entry (if any) sets the mean.
SpectralField cosine_potential(const GridSpec& grid, const std::vector<CosineMode>& modes);

/// Rescales f so that ||grad f||_{\dot H^1} = amplitude (no-op for f = 0).
SpectralField normalize_gradient_h1(SpectralField f, double amplitude);

/// SplitMix64 step, used to derive independent per-item seeds from one seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace dburgers
