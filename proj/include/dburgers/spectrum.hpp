#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dburgers/grid.hpp"

namespace dburgers {

/// One distinct Laplacian eigenvalue (2 pi / L)^2 |k|^2.
struct SpectrumEntry {
  std::int64_t k2 = 0;           // integer |k|^2
  double lambda = 0.0;           // scaled eigenvalue
  std::int64_t multiplicity = 0; // lattice points with this |k|^2
  Wavevector representative{0, 0};
};

/// Sorted distinct eigenvalues with |k|^2 <= cutoff.
struct SpectrumTable {
  int d = 1;
  double length = 0.0;
  std::int64_t cutoff = 0;
  std::vector<SpectrumEntry> entries;

  double unit() const;  // (2 pi / L)^2
  std::size_t size() const { return entries.size(); }
  const SpectrumEntry& operator[](std::size_t n) const { return entries[n]; }
};

SpectrumTable enumerate(int d, double length, std::int64_t cutoff);

struct GapEntry {
  std::size_t n = 0;
  std::int64_t k2_gap = 0;  // |k_{n+1}|^2 - |k_n|^2
  double gap = 0.0;         // Lambda_{n+1} - Lambda_n
};

std::vector<GapEntry> gaps(const SpectrumTable& table);

/// Smallest n with Lambda_{n+1} - Lambda_n >= g.
std::optional<std::size_t> first_index_with_gap(const SpectrumTable& table, double g);

enum class GapComparator { strict, nonstrict };

/// Whether lambda_{n+1} - lambda_n compares against
/// 2C (lambda_n^{(a-b)/2} + lambda_{n+1}^{(a-b)/2}), with 0^0 = 1.
bool sgc_holds(const SpectrumTable& table, std::size_t n, double C, double alpha, double beta,
               GapComparator cmp = GapComparator::strict);

/// Smallest n at which sgc_holds. Throws InvalidArgument unless
/// 0 <= alpha - beta <= 1 and C >= 0.
std::optional<std::size_t> check_sgc(const SpectrumTable& table, double C, double alpha, double beta,
                                     GapComparator cmp = GapComparator::strict);

std::string to_string(GapComparator c);

}  // namespace dburgers
