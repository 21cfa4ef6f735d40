#include "dburgers/symbol.hpp"

#include "dburgers/errors.hpp"

namespace dburgers {

MultiplierSymbol MultiplierSymbol::custom(std::map<Wavevector, double> table) {
  auto zero = table.find(Wavevector{0, 0});
  if (zero != table.end() && zero->second != 0.0) throw InvalidArgument("custom symbol must vanish at k = 0");
  MultiplierSymbol s(Kind::custom, 0.0);
  s.table_ = std::move(table);
  return s;
}

double MultiplierSymbol::radial(double kappa_sq) const {
  if (kappa_sq == 0.0) return 0.0;
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::bse: return alpha_ - 1.0;
    case Kind::qse: return alpha_ * kappa_sq / (1.0 + kappa_sq);
    case Kind::kse: return alpha_ * kappa_sq * (1.0 - kappa_sq);
    case Kind::custom: break;
  }
  throw InvalidArgument("custom symbol has no radial form");
}

double MultiplierSymbol::operator()(const Wavevector& k, double length) const {
  if (k[0] == 0 && k[1] == 0) return 0.0;
  if (kind_ == Kind::custom) {
    auto it = table_.find(k);
    if (it == table_.end())
      throw InvalidArgument("custom symbol table has no entry for k = (" + std::to_string(k[0]) + ", " +
                            std::to_string(k[1]) + ")");
    return it->second;
  }
  const double u = 2.0 * std::numbers::pi / length;
  const double kappa_sq = u * u * (double(k[0]) * k[0] + double(k[1]) * k[1]);
  return radial(kappa_sq);
}

std::string to_string(MultiplierSymbol::Kind kind) {
  switch (kind) {
    case MultiplierSymbol::Kind::zero: return "zero";
    case MultiplierSymbol::Kind::bse: return "bse";
    case MultiplierSymbol::Kind::qse: return "qse";
    case MultiplierSymbol::Kind::kse: return "kse";
    case MultiplierSymbol::Kind::custom: return "custom";
  }
  return "?";
}

MultiplierSymbol::Kind symbol_kind_from_string(std::string_view name) {
  if (name == "zero") return MultiplierSymbol::Kind::zero;
  if (name == "bse") return MultiplierSymbol::Kind::bse;
  if (name == "qse") return MultiplierSymbol::Kind::qse;
  if (name == "kse") return MultiplierSymbol::Kind::kse;
  if (name == "custom") return MultiplierSymbol::Kind::custom;
  throw InvalidArgument("unknown symbol kind '" + std::string(name) + "'");
}

}  // namespace dburgers
