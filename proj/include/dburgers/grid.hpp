#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>

namespace dburgers {

enum class DealiasRule { none, two_thirds };

std::string to_string(DealiasRule rule);
DealiasRule dealias_rule_from_string(std::string_view name);

/// Integer wavevector; the second entry is unused (and zero) in 1D.
using Wavevector = std::array<int, 2>;

/// Periodic collocation grid on Q = [-L/2, L/2]^d with N points per axis.
///
/// Coefficients and samples are stored flat in FFT order: index i along an
/// axis carries wavenumber i for i < N/2 and i - N otherwise. In 2D the flat
/// index is i1 * N + i2, so axis 1 is the slow one.
struct GridSpec {
  int d = 1;
  int n = 64;
  double length = 2.0 * std::numbers::pi;
  DealiasRule dealias = DealiasRule::two_thirds;

  /// Throws InvalidArgument unless d is 1 or 2, N is even and >= 8, and L > 0.
  void validate() const;

  std::size_t size() const { return d == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n); }

  /// 2 pi / L, the wavenumber of the |k| = 1 mode.
  double kappa_unit() const { return 2.0 * std::numbers::pi / length; }

  /// Rectangle-rule quadrature weight (L/N)^d.
  double cell_volume() const { return std::pow(length / n, d); }

  /// L^d.
  double volume() const { return std::pow(length, d); }

  int wavenumber(std::size_t axis_index) const {
    const int i = static_cast<int>(axis_index);
    return i < n / 2 ? i : i - n;
  }

  Wavevector wavevector(std::size_t flat) const {
    if (d == 1) return {wavenumber(flat), 0};
    return {wavenumber(flat / std::size_t(n)), wavenumber(flat % std::size_t(n))};
  }

  /// Flat index of wavevector k; k must be representable (|k_i| <= N/2,
  /// with +N/2 aliased onto -N/2).
  std::size_t index_of(const Wavevector& k) const;

  bool representable(const Wavevector& k) const;

  /// True when k lies on a Nyquist line (some |k_i| == N/2).
  bool is_nyquist(const Wavevector& k) const {
    return k[0] == -n / 2 || (d == 2 && k[1] == -n / 2);
  }

  long long k_squared(std::size_t flat) const {
    const auto k = wavevector(flat);
    return static_cast<long long>(k[0]) * k[0] + static_cast<long long>(k[1]) * k[1];
  }

  /// kappa^2 = (2 pi / L)^2 |k|^2 for the mode at flat index.
  double kappa_squared(std::size_t flat) const {
    const double u = kappa_unit();
    return u * u * static_cast<double>(k_squared(flat));
  }

  /// Largest retained |k_i| under the two-thirds rule: the largest integer
  /// strictly below N/3, so quadratic products of retained modes never alias
  /// back into the retained band.
  int dealias_cutoff() const { return (n - 1) / 3; }

  /// Physical coordinate of grid point j along an axis.
  double coordinate(std::size_t j) const { return -0.5 * length + length * static_cast<double>(j) / n; }

  bool operator==(const GridSpec&) const = default;
};

}  // namespace dburgers
