#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dburgers/fft.hpp"
#include "dburgers/grid.hpp"
#include "dburgers/symbol.hpp"

namespace dburgers {

/// Samples of a real field on the collocation grid, flat in the grid's order.
struct PhysicalField {
  GridSpec grid;
  std::vector<double> values;

  PhysicalField() = default;
  explicit PhysicalField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
  PhysicalField(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Real periodic scalar field held as Fourier coefficients c(k), with
/// f(x) = sum_k c(k) e^{2 pi i k.x / L}. Coefficients are Hermitian,
/// c(-k) = conj(c(k)); when zero_mean is set c(0) is kept at 0.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid, bool zero_mean = false);
  SpectralField(const GridSpec& grid, std::vector<cplx> coeffs, bool zero_mean);

  const GridSpec& grid() const { return grid_; }
  bool zero_mean() const { return zero_mean_; }
  void set_zero_mean(bool flag);

  std::size_t size() const { return coeffs_.size(); }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx& operator[](std::size_t flat) { return coeffs_[flat]; }
  const cplx& operator[](std::size_t flat) const { return coeffs_[flat]; }

  /// Coefficient at wavevector k (k = +N/2 aliases onto -N/2).
  cplx coeff(const Wavevector& k) const { return coeffs_[grid_.index_of(k)]; }
  /// Sets c(k) and c(-k) = conj(value) together.
  void set_coeff(const Wavevector& k, cplx value);

  /// Largest |c(-k) - conj(c(k))| over all modes.
  double hermitian_defect() const;
  /// Overwrites each pair with its Hermitian average.
  void symmetrize();

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  void check_compatible(const SpectralField& other) const;

  GridSpec grid_;
  std::vector<cplx> coeffs_;
  bool zero_mean_ = false;
};

/// d-tuple of zero-mean spectral fields; U = grad phi.
struct VectorField {
  std::vector<SpectralField> components;

  VectorField() = default;
  explicit VectorField(const GridSpec& grid);
  explicit VectorField(std::vector<SpectralField> comps) : components(std::move(comps)) {}

  const GridSpec& grid() const { return components.front().grid(); }
  int dim() const { return static_cast<int>(components.size()); }
  SpectralField& operator[](int i) { return components[std::size_t(i)]; }
  const SpectralField& operator[](int i) const { return components[std::size_t(i)]; }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double s);
  VectorField& axpy(double s, const VectorField& other);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
};

/// Norm selector. L2 and Hs are computed by Parseval with the explicit L^d
/// factor, ||f||^2 = L^d sum_k |kappa|^{2s} |c(k)|^2; Lp and Linf use the
/// rectangle rule on the grid. H1 is the inhomogeneous Sobolev norm
/// (||f||^2 + ||grad f||^2)^{1/2}, used where constants must count.
struct Norm {
  enum class Kind { l2, linf, lp, hs, h1_full };
  Kind kind = Kind::l2;
  double param = 0.0;

  static Norm l2() { return {Kind::l2, 0.0}; }
  static Norm linf() { return {Kind::linf, 0.0}; }
  static Norm lp(double p) { return {Kind::lp, p}; }
  /// Homogeneous seminorm ||f||_{\dot H^s}.
  static Norm hs(double s) { return {Kind::hs, s}; }
  static Norm h1_full() { return {Kind::h1_full, 0.0}; }
};

// Transforms ---------------------------------------------------------------

PhysicalField to_physical(const SpectralField& f);
/// Forward transform of real samples; the output is symmetrized so that
/// c(k) and conj(c(-k)) agree exactly.
SpectralField to_spectral(const PhysicalField& samples, bool zero_mean = false);
/// Size-checked variant taking raw samples.
SpectralField to_spectral(std::span<const double> samples, const GridSpec& grid, bool zero_mean = false);

// Spectral operators ----------------------------------------------------------

/// Multiplies c(k) by (2 pi i k_axis / L)^order; axis is 1-based. For odd
/// orders the Nyquist line is zeroed so the result stays real.
SpectralField differentiate(const SpectralField& f, int axis, int order = 1);
SpectralField laplacian(const SpectralField& f);
VectorField gradient(const SpectralField& f);
SpectralField divergence(const VectorField& v);
/// d_{x2} u1 - d_{x1} u2 (2D only).
SpectralField curl(const VectorField& v);
/// ||curl V|| / ||grad V||, or 0 for a zero field or d = 1.
double curl_residual(const VectorField& v);

/// c_out(k) = m(k) c(k).
SpectralField apply_multiplier(const SpectralField& f, const MultiplierSymbol& symbol);

/// Zeroes every coefficient with some |k_i| > GridSpec::dealias_cutoff().
SpectralField dealias(const SpectralField& f);
/// Applies dealias() only when the grid's rule is two_thirds.
SpectralField dealias_by_rule(const SpectralField& f);

double mean(const SpectralField& f);
SpectralField subtract_mean(const SpectralField& f);

/// Projects each coefficient vector onto span{k}: c_out = (k.c / |k|^2) k.
/// Nyquist lines are zeroed. Throws InvalidArgument for d = 1.
VectorField gradient_project(const VectorField& v);

/// Potential phi (zero mean) with grad phi = gradient_project(v).
SpectralField potential_of(const VectorField& v);

// Norms ----------------------------------------------------------------------

double norm(const SpectralField& f, const Norm& kind);
/// Combined over components: sqrt(sum ||u_i||^2) for L2/Hs/H1, the max for
/// Linf and (sum ||u_i||_p^p)^{1/p} for Lp.
double norm(const VectorField& v, const Norm& kind);
double norm(const PhysicalField& f, const Norm& kind);

/// Pointwise max(f(x_j), 0). Lives in physical space only.
PhysicalField positive_part(const SpectralField& f);

/// Rectangle-rule integral of grid samples.
double integrate(const PhysicalField& f);

// Pointwise helpers ----------------------------------------------------------

PhysicalField multiply(const PhysicalField& a, const PhysicalField& b);
double min_value(const PhysicalField& f);
double max_abs(const PhysicalField& f);
bool all_finite(const PhysicalField& f);

}  // namespace dburgers
