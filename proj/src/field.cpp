#include "dburgers/field.hpp"

#include <algorithm>
#include <cmath>

#include "dburgers/errors.hpp"

namespace dburgers {
namespace {

// Coefficients refer to e^{2 pi i k.x/L} with x_j = -L/2 + jL/N, so the DFT
// picks up a factor (-1)^{k_1 + k_2} relative to them.
double shift_sign(const GridSpec& grid, std::size_t flat) {
  const auto k = grid.wavevector(flat);
  return ((k[0] + k[1]) % 2 == 0) ? 1.0 : -1.0;
}

std::size_t negated_index(const GridSpec& grid, std::size_t flat) {
  const auto k = grid.wavevector(flat);
  return grid.index_of({-k[0], -k[1]});
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

}  // namespace

PhysicalField::PhysicalField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw InvalidArgument("physical field: sample count does not match grid");
}

// SpectralField ---------------------------------------------------------------

SpectralField::SpectralField(const GridSpec& grid, bool zero_mean)
    : grid_(grid), coeffs_(grid.size(), cplx{}), zero_mean_(zero_mean) {
  grid_.validate();
}

SpectralField::SpectralField(const GridSpec& grid, std::vector<cplx> coeffs, bool zero_mean)
    : grid_(grid), coeffs_(std::move(coeffs)), zero_mean_(zero_mean) {
  grid_.validate();
  if (coeffs_.size() != grid_.size()) throw InvalidArgument("spectral field: coefficient count does not match grid");
  if (zero_mean_) coeffs_[0] = 0.0;
}

void SpectralField::set_zero_mean(bool flag) {
  zero_mean_ = flag;
  if (flag) coeffs_[0] = 0.0;
}

void SpectralField::set_coeff(const Wavevector& k, cplx value) {
  const std::size_t i = grid_.index_of(k);
  const std::size_t j = grid_.index_of({-k[0], -k[1]});
  if (i == j) value = {value.real(), 0.0};
  coeffs_[i] = value;
  coeffs_[j] = std::conj(value);
  if (zero_mean_) coeffs_[0] = 0.0;
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    worst = std::max(worst, std::abs(coeffs_[negated_index(grid_, i)] - std::conj(coeffs_[i])));
  return worst;
}

void SpectralField::symmetrize() {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::size_t j = negated_index(grid_, i);
    if (j < i) continue;
    const cplx avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = avg;
    coeffs_[j] = std::conj(avg);
  }
  if (zero_mean_) coeffs_[0] = 0.0;
}

void SpectralField::check_compatible(const SpectralField& other) const {
  require_same_grid(grid_, other.grid_, "spectral field arithmetic");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  if (zero_mean_) coeffs_[0] = 0.0;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  if (zero_mean_) coeffs_[0] = 0.0;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  if (zero_mean_) coeffs_[0] = 0.0;
  return *this;
}

// VectorField -----------------------------------------------------------------

VectorField::VectorField(const GridSpec& grid) {
  for (int i = 0; i < grid.d; ++i) components.emplace_back(grid, true);
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (std::size_t i = 0; i < components.size(); ++i) components[i] += other.components.at(i);
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (std::size_t i = 0; i < components.size(); ++i) components[i] -= other.components.at(i);
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

VectorField& VectorField::axpy(double s, const VectorField& other) {
  for (std::size_t i = 0; i < components.size(); ++i) components[i].axpy(s, other.components.at(i));
  return *this;
}

// Transforms ------------------------------------------------------------------

PhysicalField to_physical(const SpectralField& f) {
  const GridSpec& grid = f.grid();
  std::vector<cplx> work(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= shift_sign(grid, i);
  fft::backward(grid, work);
  PhysicalField out(grid);
  for (std::size_t i = 0; i < work.size(); ++i) out.values[i] = work[i].real();
  return out;
}

SpectralField to_spectral(std::span<const double> samples, const GridSpec& grid, bool zero_mean) {
  if (samples.size() != grid.size()) throw InvalidArgument("to_spectral: sample count does not match grid");
  std::vector<cplx> work(samples.begin(), samples.end());
  fft::forward(grid, work);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= scale * shift_sign(grid, i);
  SpectralField out(grid, std::move(work), false);
  out.symmetrize();
  out.set_zero_mean(zero_mean);
  return out;
}

SpectralField to_spectral(const PhysicalField& samples, bool zero_mean) {
  return to_spectral(samples.values, samples.grid, zero_mean);
}

// Spectral operators ----------------------------------------------------------

SpectralField differentiate(const SpectralField& f, int axis, int order) {
  const GridSpec& grid = f.grid();
  if (axis < 1 || axis > grid.d) throw InvalidArgument("differentiate: axis out of range");
  if (order < 1) throw InvalidArgument("differentiate: order must be >= 1");
  SpectralField out(grid, true);
  const double unit = grid.kappa_unit();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto k = grid.wavevector(i);
    const int ka = k[std::size_t(axis - 1)];
    if (ka == 0) continue;
    if (order % 2 == 1 && ka == -grid.n / 2) continue;
    out[i] = f[i] * std::pow(cplx(0.0, unit * ka), order);
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const GridSpec& grid = f.grid();
  SpectralField out(grid, true);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = -grid.kappa_squared(i) * f[i];
  return out;
}

VectorField gradient(const SpectralField& f) {
  VectorField v;
  for (int a = 1; a <= f.grid().d; ++a) v.components.push_back(differentiate(f, a, 1));
  return v;
}

SpectralField divergence(const VectorField& v) {
  SpectralField out = differentiate(v[0], 1, 1);
  if (v.dim() == 2) out += differentiate(v[1], 2, 1);
  return out;
}

SpectralField curl(const VectorField& v) {
  if (v.dim() != 2) throw InvalidArgument("curl: requires d = 2");
  return differentiate(v[0], 2, 1) - differentiate(v[1], 1, 1);
}

double curl_residual(const VectorField& v) {
  if (v.dim() != 2) return 0.0;
  const double denom = norm(v, Norm::hs(1.0));
  if (denom == 0.0) return 0.0;
  return norm(curl(v), Norm::l2()) / denom;
}

SpectralField apply_multiplier(const SpectralField& f, const MultiplierSymbol& symbol) {
  const GridSpec& grid = f.grid();
  SpectralField out(grid, true);
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] == cplx{}) continue;
    out[i] = symbol(grid.wavevector(i), grid.length) * f[i];
  }
  return out;
}

SpectralField dealias(const SpectralField& f) {
  const GridSpec& grid = f.grid();
  const int cut = grid.dealias_cutoff();
  SpectralField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto k = grid.wavevector(i);
    if (std::abs(k[0]) > cut || std::abs(k[1]) > cut) out[i] = 0.0;
  }
  return out;
}

SpectralField dealias_by_rule(const SpectralField& f) {
  return f.grid().dealias == DealiasRule::two_thirds ? dealias(f) : f;
}

double mean(const SpectralField& f) { return f[0].real(); }

SpectralField subtract_mean(const SpectralField& f) {
  SpectralField out = f;
  out.set_zero_mean(true);
  return out;
}

VectorField gradient_project(const VectorField& v) {
  if (v.dim() != 2) throw InvalidArgument("gradient_project: requires d = 2");
  const GridSpec& grid = v.grid();
  VectorField out(grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    if (grid.is_nyquist(k)) continue;
    const double k1 = k[0], k2 = k[1];
    const cplx dot = (k1 * v[0][i] + k2 * v[1][i]) / (k1 * k1 + k2 * k2);
    out[0][i] = dot * k1;
    out[1][i] = dot * k2;
  }
  return out;
}

SpectralField potential_of(const VectorField& v) {
  const GridSpec& grid = v.grid();
  SpectralField phi(grid, true);
  const double unit = grid.kappa_unit();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    if (grid.is_nyquist(k)) continue;
    // grad phi = i kappa k phi  =>  phi = -i (k.v) / (kappa |k|^2)
    cplx dot = double(k[0]) * v[0][i];
    if (grid.d == 2) dot += double(k[1]) * v[1][i];
    const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
    phi[i] = cplx(0.0, -1.0) * dot / (unit * k2);
  }
  return phi;
}

// Norms -----------------------------------------------------------------------

double integrate(const PhysicalField& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.cell_volume();
}

double norm(const PhysicalField& f, const Norm& kind) {
  switch (kind.kind) {
    case Norm::Kind::linf: return max_abs(f);
    case Norm::Kind::l2: {
      double s = 0.0;
      for (double v : f.values) s += v * v;
      return std::sqrt(s * f.grid.cell_volume());
    }
    case Norm::Kind::lp: {
      if (!(kind.param >= 1.0)) throw InvalidArgument("Lp norm requires p >= 1");
      double s = 0.0;
      for (double v : f.values) s += std::pow(std::abs(v), kind.param);
      return std::pow(s * f.grid.cell_volume(), 1.0 / kind.param);
    }
    default: break;
  }
  throw InvalidArgument("Sobolev norms need spectral coefficients");
}

double norm(const SpectralField& f, const Norm& kind) {
  const GridSpec& grid = f.grid();
  switch (kind.kind) {
    case Norm::Kind::linf:
    case Norm::Kind::lp: return norm(to_physical(f), kind);
    case Norm::Kind::l2:
    case Norm::Kind::hs:
    case Norm::Kind::h1_full: break;
  }
  const double s = kind.kind == Norm::Kind::hs ? kind.param : 0.0;
  if (kind.kind == Norm::Kind::hs && s < 0.0 && std::abs(f[0]) != 0.0)
    throw InvalidArgument("negative-order Sobolev norm of a field with nonzero mean");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a2 = std::norm(f[i]);
    if (a2 == 0.0) continue;
    const double ks = grid.kappa_squared(i);
    double weight = 1.0;
    if (kind.kind == Norm::Kind::h1_full) {
      weight = 1.0 + ks;
    } else if (s != 0.0) {
      if (ks == 0.0) continue;
      weight = std::pow(ks, s);
    }
    sum += weight * a2;
  }
  return std::sqrt(sum * grid.volume());
}

double norm(const VectorField& v, const Norm& kind) {
  switch (kind.kind) {
    case Norm::Kind::linf: {
      double m = 0.0;
      for (const auto& c : v.components) m = std::max(m, norm(c, kind));
      return m;
    }
    case Norm::Kind::lp: {
      double s = 0.0;
      for (const auto& c : v.components) s += std::pow(norm(c, kind), kind.param);
      return std::pow(s, 1.0 / kind.param);
    }
    default: {
      double s = 0.0;
      for (const auto& c : v.components) {
        const double x = norm(c, kind);
        s += x * x;
      }
      return std::sqrt(s);
    }
  }
}

PhysicalField positive_part(const SpectralField& f) {
  PhysicalField out = to_physical(f);
  for (double& v : out.values) v = std::max(v, 0.0);
  return out;
}

// Pointwise -------------------------------------------------------------------

PhysicalField multiply(const PhysicalField& a, const PhysicalField& b) {
  require_same_grid(a.grid, b.grid, "multiply");
  PhysicalField out(a.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

double min_value(const PhysicalField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

double max_abs(const PhysicalField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const PhysicalField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace dburgers
