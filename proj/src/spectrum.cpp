#include "dburgers/spectrum.hpp"

#include <cmath>
#include <numbers>

#include "dburgers/errors.hpp"

namespace dburgers {

double SpectrumTable::unit() const {
  const double u = 2.0 * std::numbers::pi / length;
  return u * u;
}

SpectrumTable enumerate(int d, double length, std::int64_t cutoff) {
  if (d != 1 && d != 2) throw InvalidArgument("enumerate: d must be 1 or 2");
  if (!(length > 0.0)) throw InvalidArgument("enumerate: L must be positive");
  if (cutoff < 1) throw InvalidArgument("enumerate: cutoff must be at least 1");

  SpectrumTable t;
  t.d = d;
  t.length = length;
  t.cutoff = cutoff;
  const double unit = t.unit();

  if (d == 1) {
    for (std::int64_t k = 0; k * k <= cutoff; ++k)
      t.entries.push_back({k * k, unit * double(k * k), k == 0 ? 1 : 2, {int(k), 0}});
    return t;
  }

  // Count points of Z^2 on each circle from the first quadrant.
  std::vector<std::int64_t> count(std::size_t(cutoff) + 1, 0);
  std::vector<Wavevector> rep(std::size_t(cutoff) + 1, Wavevector{-1, -1});
  for (std::int64_t a = 0; a * a <= cutoff; ++a)
    for (std::int64_t b = 0; a * a + b * b <= cutoff; ++b) {
      const auto s = std::size_t(a * a + b * b);
      count[s] += (a > 0 ? 2 : 1) * (b > 0 ? 2 : 1);
      if (rep[s][0] < 0) rep[s] = {int(a), int(b)};
    }
  for (std::size_t s = 0; s < count.size(); ++s)
    if (count[s] > 0) t.entries.push_back({std::int64_t(s), unit * double(s), count[s], rep[s]});
  return t;
}

std::vector<GapEntry> gaps(const SpectrumTable& table) {
  std::vector<GapEntry> out;
  for (std::size_t n = 0; n + 1 < table.size(); ++n) {
    const std::int64_t g = table[n + 1].k2 - table[n].k2;
    out.push_back({n, g, table.unit() * double(g)});
  }
  return out;
}

std::optional<std::size_t> first_index_with_gap(const SpectrumTable& table, double g) {
  for (const auto& e : gaps(table))
    if (e.gap >= g) return e.n;
  return std::nullopt;
}

namespace {

double power_or_one(double x, double e) { return e == 0.0 ? 1.0 : std::pow(x, e); }

}  // namespace

bool sgc_holds(const SpectrumTable& table, std::size_t n, double C, double alpha, double beta, GapComparator cmp) {
  if (n + 1 >= table.size()) return false;
  const double ln = table[n].lambda, ln1 = table[n + 1].lambda;
  const double e = 0.5 * (alpha - beta);
  const double gap = table.unit() * double(table[n + 1].k2 - table[n].k2);
  const double rhs = 2.0 * C * (power_or_one(ln, e) + power_or_one(ln1, e));
  return cmp == GapComparator::strict ? gap > rhs : gap >= rhs;
}

std::optional<std::size_t> check_sgc(const SpectrumTable& table, double C, double alpha, double beta,
                                     GapComparator cmp) {
  const double diff = alpha - beta;
  if (!(diff >= 0.0 && diff <= 1.0)) throw InvalidArgument("check_sgc: need 0 <= alpha - beta <= 1");
  if (!(C >= 0.0)) throw InvalidArgument("check_sgc: C must be nonnegative");
  for (std::size_t n = 0; n + 1 < table.size(); ++n)
    if (sgc_holds(table, n, C, alpha, beta, cmp)) return n;
  return std::nullopt;
}

std::string to_string(GapComparator c) { return c == GapComparator::strict ? "strict" : "nonstrict"; }

}  // namespace dburgers
