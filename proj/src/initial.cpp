#include "dburgers/initial.hpp"

#include <cmath>
#include <random>

#include "dburgers/errors.hpp"

namespace dburgers {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SpectralField normalize_gradient_h1(SpectralField f, double amplitude) {
  const double current = norm(f, Norm::hs(2.0));
  if (current > 0.0) f *= amplitude / current;
  return f;
}

SpectralField random_smooth_potential(const GridSpec& grid, std::uint64_t seed, double amplitude,
                                      double slope) {
  if (amplitude < 0.0) throw InvalidArgument("random IC amplitude must be nonnegative");
  SpectralField phi(grid, true);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double kmax = grid.n / 4.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    // Draw once per Hermitian pair, on the member with the positive leading entry.
    const bool canonical = k[0] > 0 || (k[0] == 0 && k[1] > 0);
    if (!canonical || grid.is_nyquist(k)) continue;
    const double kk = std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1]);
    if (kk > kmax) continue;
    const double theta = phase(rng);
    phi.set_coeff(k, std::pow(kk, -slope) * std::polar(1.0, theta));
  }
  return normalize_gradient_h1(std::move(phi), amplitude);
}

SpectralField cosine_potential(const GridSpec& grid, const std::vector<CosineMode>& modes) {
  SpectralField phi(grid, false);
  for (const auto& m : modes) {
    if (m.k[0] == 0 && m.k[1] == 0) {
      phi[0] += m.amplitude * std::cos(m.phase);
      continue;
    }
    const std::size_t i = grid.index_of(m.k);
    const std::size_t j = grid.index_of({-m.k[0], -m.k[1]});
    const cplx half = 0.5 * std::polar(m.amplitude, m.phase);
    if (i == j) {
      phi[i] += 2.0 * half.real();
    } else {
      phi[i] += half;
      phi[j] += std::conj(half);
    }
  }
  return phi;
}

}  // namespace dburgers
