#include "dburgers/grid.hpp"

#include <cstdlib>

#include "dburgers/errors.hpp"

namespace dburgers {

std::string to_string(DealiasRule rule) { return rule == DealiasRule::none ? "none" : "two_thirds"; }

DealiasRule dealias_rule_from_string(std::string_view name) {
  if (name == "none") return DealiasRule::none;
  if (name == "two_thirds" || name == "two-thirds") return DealiasRule::two_thirds;
  throw InvalidArgument("unknown dealias rule '" + std::string(name) + "'");
}

void GridSpec::validate() const {
  if (d != 1 && d != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (n < 8 || n % 2 != 0) throw InvalidArgument("grid N must be even and >= 8");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("grid length L must be positive");
}

bool GridSpec::representable(const Wavevector& k) const {
  const auto ok = [this](int ki) { return std::abs(ki) <= n / 2; };
  return ok(k[0]) && (d == 2 ? ok(k[1]) : k[1] == 0);
}

std::size_t GridSpec::index_of(const Wavevector& k) const {
  if (!representable(k)) throw InvalidArgument("wavevector not representable on grid");
  // Modular reduction maps +N/2 onto the -N/2 slot.
  const auto slot = [this](int ki) { return static_cast<std::size_t>(((ki % n) + n) % n); };
  if (d == 1) return slot(k[0]);
  return slot(k[0]) * std::size_t(n) + slot(k[1]);
}

}  // namespace dburgers
