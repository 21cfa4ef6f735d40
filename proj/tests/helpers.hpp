#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "dburgers/field.hpp"

namespace test {

using namespace dburgers;

inline constexpr double kPi = std::numbers::pi;

inline GridSpec grid1(int n = 64, double length = 2 * kPi, DealiasRule rule = DealiasRule::two_thirds) {
  return GridSpec{1, n, length, rule};
}

inline GridSpec grid2(int n = 32, double length = 2 * kPi, DealiasRule rule = DealiasRule::two_thirds) {
  return GridSpec{2, n, length, rule};
}

/// Random real field with independent Gaussian coefficients on |k_i| <= kmax,
/// decaying like 1 / (1 + |k|^2). Nyquist lines are left empty.
inline SpectralField random_field(const GridSpec& g, unsigned seed, int kmax, bool zero_mean = true,
                                  double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  SpectralField f(g, zero_mean);
  const int k2max = g.d == 2 ? kmax : 0;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -k2max; b <= k2max; ++b) {
      const Wavevector k{a, b};
      const Wavevector mk{-a, -b};
      if (mk < k) continue;
      if (k == Wavevector{0, 0}) {
        if (!zero_mean) f.set_coeff(k, scale * n01(rng));
        continue;
      }
      const double w = scale / (1.0 + a * a + b * b);
      f.set_coeff(k, {w * n01(rng), w * n01(rng)});
    }
  return f;
}

inline double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_coeff(const SpectralField& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

inline PhysicalField sample(const GridSpec& g, auto fn) {
  PhysicalField s(g);
  if (g.d == 1) {
    for (int j = 0; j < g.n; ++j) s[std::size_t(j)] = fn(g.coordinate(std::size_t(j)), 0.0);
  } else {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        s[std::size_t(i) * std::size_t(g.n) + std::size_t(j)] =
            fn(g.coordinate(std::size_t(i)), g.coordinate(std::size_t(j)));
  }
  return s;
}

}  // namespace test
