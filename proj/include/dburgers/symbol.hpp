#pragma once

#include <map>
#include <string>
#include <string_view>

#include "dburgers/grid.hpp"

namespace dburgers {

/// Symbol m(k) of the Fourier multiplier T responsible for the
/// low-wavenumber instability. m(0) = 0 for every kind.
///
///   zero:   m = 0
///   bse:    m = alpha - 1                          (k != 0)
///   qse:    m = alpha kappa^2 / (1 + kappa^2)
///   kse:    m = alpha kappa^2 (1 - kappa^2)        (unbounded)
///   custom: m read from a table keyed by wavevector
///
/// with kappa = (2 pi / L) |k|.
class MultiplierSymbol {
 public:
  enum class Kind { zero, bse, qse, kse, custom };

  MultiplierSymbol() = default;

  static MultiplierSymbol zero() { return MultiplierSymbol(Kind::zero, 0.0); }
  static MultiplierSymbol bse(double alpha) { return MultiplierSymbol(Kind::bse, alpha); }
  static MultiplierSymbol qse(double alpha) { return MultiplierSymbol(Kind::qse, alpha); }
  static MultiplierSymbol kse(double alpha) { return MultiplierSymbol(Kind::kse, alpha); }
  /// Entries at k = 0 must be zero. In 1D the second component of each key is 0.
  static MultiplierSymbol custom(std::map<Wavevector, double> table);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  bool bounded() const { return kind_ != Kind::kse; }
  const std::map<Wavevector, double>& table() const { return table_; }

  /// m(k) on a box of side L. Throws InvalidArgument for a custom table
  /// missing k.
  double operator()(const Wavevector& k, double length) const;

  /// m as a function of kappa^2 for the radial kinds (not custom).
  double radial(double kappa_sq) const;

  bool operator==(const MultiplierSymbol&) const = default;

 private:
  MultiplierSymbol(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_ = Kind::zero;
  double alpha_ = 0.0;
  std::map<Wavevector, double> table_;
};

std::string to_string(MultiplierSymbol::Kind kind);
MultiplierSymbol::Kind symbol_kind_from_string(std::string_view name);

}  // namespace dburgers
