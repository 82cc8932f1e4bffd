#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "../ops.hpp"
#include "../random.hpp"

namespace hmhd {

/// Dyadic partition phi(2^{-j} xi), j in [j_min, j_max], built from the smooth cutoff chi.
struct DyadicPartition {
  Grid grid;
  int j_min = 0;
  int j_max = 0;
  int margin = 2;

  /// 1 on [0, 3/4], 0 on [4/3, inf), C-infinity step in between.
  static double chi(double rho) {
    if (rho <= 0.75) return 1.0;
    if (rho >= 4.0 / 3.0) return 0.0;
    return 1.0 - detail::smooth_step((rho - 0.75) / (4.0 / 3.0 - 0.75));
  }
  static double partition_phi(double rho) { return chi(rho / 2.0) - chi(rho); }

  double weight(int j, double xi_mag) const { return partition_phi(std::ldexp(xi_mag, -j)); }

  int block_count() const { return j_max - j_min + 1; }

  /// Nonzero (j, phi_j) pairs for squared integer radius k2; at most two entries.
  const std::vector<std::pair<int, double>>& weights_k2(long k2) const { return table_[k2]; }

  /// Interior range kept away from the edges by `margin` blocks.
  int interior_min() const { return j_min + margin; }
  int interior_max() const { return j_max - margin; }

  void build_table() {
    const long max_k2 = 3L * (grid.N / 2) * (grid.N / 2);
    table_.assign(max_k2 + 1, {});
    for (long k2 = 1; k2 <= max_k2; ++k2) {
      const double xi = std::sqrt(double(k2)) / grid.L;
      for (int j = j_min; j <= j_max; ++j) {
        const double w = weight(j, xi);
        if (w != 0.0) table_[k2].push_back({j, w});
      }
    }
  }

 private:
  std::vector<std::vector<std::pair<int, double>>> table_;
};

inline DyadicPartition build_partition(const Grid& g, int margin = 2) {
  g.validate();
  if (margin < 2) throw ConfigError("partition margin must be >= 2, got " + std::to_string(margin));
  DyadicPartition part;
  part.grid = g;
  part.margin = margin;
  part.j_min = int(std::floor(std::log2(1.0 / g.L))) - margin;
  part.j_max = int(std::ceil(std::log2(g.xi_max()))) + margin;
  if (part.block_count() < 2 * margin + 1)
    throw ConfigError("resolution too small for partition margin " + std::to_string(margin));
  part.build_table();
  const long max_k2 = 3L * (g.N / 2) * (g.N / 2);
  for (long k2 = 1; k2 <= max_k2; ++k2) {
    double s = 0.0;
    for (const auto& jw : part.weights_k2(k2)) s += jw.second;
    if (std::abs(s - 1.0) > 1e-12)
      throw ConfigError("partition does not telescope to 1 at |k|^2 = " + std::to_string(k2));
  }
  return part;
}

namespace detail {
inline long k2_of(int k0, int k1, int k2) { return long(k0) * k0 + long(k1) * k1 + long(k2) * k2; }

inline double lookup_weight(const DyadicPartition& part, long k2, int j) {
  for (const auto& jw : part.weights_k2(k2))
    if (jw.first == j) return jw.second;
  return 0.0;
}
}  // namespace detail

/// Delta_j u; zero for j outside the partition range.
inline SpectralField delta_j(const DyadicPartition& part, const SpectralField& u, int j) {
  require_same_grid(part.grid, u.grid);
  SpectralField out(u.grid, u.real);
  out.aliasing = u.aliasing;
  if (j < part.j_min || j > part.j_max) return out;
  for_each_mode(u.grid, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    const double w = detail::lookup_weight(part, detail::k2_of(k0, k1, k2), j);
    if (w != 0.0) out.c[i] = w * u.c[i];
  });
  return out;
}

inline SpectralVectorField delta_j(const DyadicPartition& part, const SpectralVectorField& v, int j) {
  return {delta_j(part, v[0], j), delta_j(part, v[1], j), delta_j(part, v[2], j)};
}

/// S_j u = sum of Delta_j' u over j' <= j - 1 inside the partition range.
inline SpectralField s_j(const DyadicPartition& part, const SpectralField& u, int j) {
  require_same_grid(part.grid, u.grid);
  SpectralField out(u.grid, u.real);
  out.aliasing = u.aliasing;
  for_each_mode(u.grid, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    double w = 0.0;
    for (const auto& jw : part.weights_k2(detail::k2_of(k0, k1, k2)))
      if (jw.first <= j - 1) w += jw.second;
    if (w != 0.0) out.c[i] = w * u.c[i];
  });
  return out;
}

struct BlockDecomposition {
  std::vector<std::pair<int, SpectralField>> blocks;
};

inline BlockDecomposition decompose(const DyadicPartition& part, const SpectralField& u) {
  BlockDecomposition d;
  for (int j = part.j_min; j <= part.j_max; ++j) d.blocks.push_back({j, delta_j(part, u, j)});
  return d;
}

inline SpectralField recompose(const BlockDecomposition& d, const Grid& g) {
  SpectralField out(g, true);
  for (const auto& b : d.blocks) add_to(out, b.second);
  return out;
}

}  // namespace hmhd
