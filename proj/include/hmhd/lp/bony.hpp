#pragma once

#include <vector>

#include "../products.hpp"
#include "partition.hpp"

namespace hmhd {

namespace detail {

// Product-grid samples of every block of u, indexed by j - j_min.
inline std::vector<rvec> physical_blocks(const DyadicPartition& part, const SpectralField& u, bool& alias) {
  std::vector<rvec> out;
  out.reserve(part.block_count());
  for (int j = part.j_min; j <= part.j_max; ++j) out.push_back(dealias::physical(delta_j(part, u, j), alias));
  return out;
}

inline void require_real_pair(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid, v.grid);
  if (!u.real || !v.real) throw ConfigError("paraproduct operators need real fields");
}

}  // namespace detail

/// T_u v = sum_j S_{j-1}u Delta_j v.
inline SpectralField paraproduct_T(const DyadicPartition& part, const SpectralField& u, const SpectralField& v) {
  detail::require_real_pair(u, v);
  bool alias = false;
  const auto U = detail::physical_blocks(part, u, alias);
  const auto V = detail::physical_blocks(part, v, alias);
  const std::size_t n = U[0].size();
  rvec low(n, 0.0), acc(n, 0.0);
  // low holds S_{j-1}u = sum_{j' <= j-2} Delta_j' u while block j of v is visited
  for (int b = 0; b < part.block_count(); ++b) {
    if (b >= 2)
      for (std::size_t i = 0; i < n; ++i) low[i] += U[b - 2][i];
    for (std::size_t i = 0; i < n; ++i) acc[i] += low[i] * V[b][i];
  }
  return dealias::spectral_full(acc, u.grid, alias);
}

/// R(u, v) = sum_k Delta_k v (Delta_{k-1} + Delta_k + Delta_{k+1}) u.
inline SpectralField remainder_R(const DyadicPartition& part, const SpectralField& u, const SpectralField& v) {
  detail::require_real_pair(u, v);
  bool alias = false;
  const auto U = detail::physical_blocks(part, u, alias);
  const auto V = detail::physical_blocks(part, v, alias);
  const std::size_t n = U[0].size();
  const int nb = part.block_count();
  rvec acc(n, 0.0);
  for (int b = 0; b < nb; ++b)
    for (int d = -1; d <= 1; ++d) {
      if (b + d < 0 || b + d >= nb) continue;
      for (std::size_t i = 0; i < n; ++i) acc[i] += V[b][i] * U[b + d][i];
    }
  return dealias::spectral_full(acc, u.grid, alias);
}

/// [Delta_j, b] a = Delta_j(b a) - b Delta_j a, both products dealiased the same way.
inline SpectralField commutator(const DyadicPartition& part, int j, const SpectralField& b, const SpectralField& a) {
  require_same_grid(a.grid, b.grid);
  return delta_j(part, pointwise_product(b, a), j) - pointwise_product(b, delta_j(part, a, j));
}

}  // namespace hmhd
