#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "../norms.hpp"
#include "partition.hpp"

namespace hmhd {

/// (s, p, r); p and r may be infinite.
struct BesovIndex {
  double s = 0.0;
  double p = 2.0;
  double r = 2.0;
};

inline void validate_index(const BesovIndex& idx) {
  if (!(idx.p >= 1.0)) throw ConfigError("Besov index needs p >= 1");
  if (!(idx.r >= 1.0)) throw ConfigError("Besov index needs r >= 1");
  if (!std::isfinite(idx.s)) throw ConfigError("Besov index needs finite s");
}

/// l^r norm of a sequence.
inline double lr_norm(const std::vector<double>& a, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : a) s += std::pow(std::abs(v), r);
  return std::pow(s, 1.0 / r);
}

namespace detail {

// sum over components of phi_j^2 |c|^2, one entry per block, for Parseval block norms
template <class Comps>
std::vector<double> block_energies(const DyadicPartition& part, const Comps& comps) {
  const Grid& g = part.grid;
  std::vector<double> e(part.block_count(), 0.0);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    double a = 0.0;
    for (const SpectralField* f : comps) a += std::norm(f->c[i]);
    if (a == 0.0) return;
    for (const auto& jw : part.weights_k2(k2_of(k0, k1, k2))) e[jw.first - part.j_min] += jw.second * jw.second * a;
  });
  return e;
}

template <class Comps>
std::vector<std::vector<double>> block_norms_impl(const DyadicPartition& part, const Comps& comps,
                                                  const std::vector<double>& ps) {
  const Grid& g = part.grid;
  std::vector<std::vector<double>> out(ps.size(), std::vector<double>(part.block_count(), 0.0));
  const std::vector<double> e = block_energies(part, comps);
  bool need_physical = false;
  for (std::size_t q = 0; q < ps.size(); ++q) {
    if (!(ps[q] >= 1.0)) throw ConfigError("block norm needs p >= 1");
    if (ps[q] == 2.0)
      for (int b = 0; b < part.block_count(); ++b) out[q][b] = std::sqrt(g.volume() * e[b]);
    else
      need_physical = true;
  }
  if (!need_physical) return out;
  for (int j = part.j_min; j <= part.j_max; ++j) {
    const int b = j - part.j_min;
    if (e[b] == 0.0) continue;
    rvec mag(g.size(), 0.0);
    for (const SpectralField* f : comps) {
      const SpectralField d = delta_j(part, *f, j);
      if (d.real) {
        const rvec s = fft::transform_to_physical(d);
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += s[i] * s[i];
      } else {
        const cvec s = fft::transform_to_physical_complex(d);
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += std::norm(s[i]);
      }
    }
    for (auto& x : mag) x = std::sqrt(x);
    for (std::size_t q = 0; q < ps.size(); ++q)
      if (ps[q] != 2.0) out[q][b] = lp_from_abs_samples(mag, ps[q], g.cell_volume());
  }
  return out;
}

}  // namespace detail

/// ||Delta_j u||_{L^p} for every block j in [j_min, j_max], for each requested p.
inline std::vector<std::vector<double>> block_norms(const DyadicPartition& part, const SpectralField& u,
                                                    const std::vector<double>& ps) {
  require_same_grid(part.grid, u.grid);
  return detail::block_norms_impl(part, std::vector<const SpectralField*>{&u}, ps);
}

/// Vector version; |.| is the pointwise Euclidean magnitude. Works for any number of components.
inline std::vector<std::vector<double>> block_norms(const DyadicPartition& part,
                                                    const std::vector<const SpectralField*>& comps,
                                                    const std::vector<double>& ps) {
  for (const auto* f : comps) require_same_grid(part.grid, f->grid);
  return detail::block_norms_impl(part, comps, ps);
}

inline std::vector<const SpectralField*> components(const SpectralVectorField& v) {
  return {&v[0], &v[1], &v[2]};
}

inline std::vector<std::vector<double>> block_norms(const DyadicPartition& part, const SpectralVectorField& v,
                                                    const std::vector<double>& ps) {
  return block_norms(part, components(v), ps);
}

/// l^r over j of 2^{js} n_j from precomputed block norms.
inline double besov_from_blocks(const DyadicPartition& part, const std::vector<double>& blocks, double s,
                                double r) {
  std::vector<double> w(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) w[b] = std::pow(2.0, (part.j_min + int(b)) * s) * blocks[b];
  return lr_norm(w, r);
}

inline double besov_norm(const DyadicPartition& part, const SpectralField& u, const BesovIndex& idx) {
  validate_index(idx);
  return besov_from_blocks(part, block_norms(part, u, {idx.p})[0], idx.s, idx.r);
}

inline double besov_norm(const DyadicPartition& part, const SpectralVectorField& v, const BesovIndex& idx) {
  validate_index(idx);
  return besov_from_blocks(part, block_norms(part, v, {idx.p})[0], idx.s, idx.r);
}

inline double besov_norm(const DyadicPartition& part, const std::vector<const SpectralField*>& comps,
                         const BesovIndex& idx) {
  validate_index(idx);
  return besov_from_blocks(part, block_norms(part, comps, {idx.p})[0], idx.s, idx.r);
}

/// L^p over the grid of the pointwise l^r-in-j of 2^{js}|Delta_j u|.
template <class Comps>
double triebel_lizorkin_impl(const DyadicPartition& part, const Comps& comps, const BesovIndex& idx) {
  validate_index(idx);
  if (std::isinf(idx.p)) throw ConfigError("Triebel-Lizorkin norm with p = inf is not supported");
  const Grid& g = part.grid;
  const std::vector<double> e = detail::block_energies(part, comps);
  rvec acc(g.size(), 0.0);
  for (int j = part.j_min; j <= part.j_max; ++j) {
    if (e[j - part.j_min] == 0.0) continue;
    rvec mag(g.size(), 0.0);
    for (const SpectralField* f : comps) {
      const SpectralField d = delta_j(part, *f, j);
      if (d.real) {
        const rvec s = fft::transform_to_physical(d);
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += s[i] * s[i];
      } else {
        const cvec s = fft::transform_to_physical_complex(d);
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += std::norm(s[i]);
      }
    }
    const double w = std::pow(2.0, j * idx.s);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      const double v = w * std::sqrt(mag[i]);
      if (std::isinf(idx.r))
        acc[i] = std::max(acc[i], v);
      else
        acc[i] += std::pow(v, idx.r);
    }
  }
  if (!std::isinf(idx.r))
    for (auto& x : acc) x = std::pow(x, 1.0 / idx.r);
  return lp_from_abs_samples(acc, idx.p, g.cell_volume());
}

inline double triebel_lizorkin_norm(const DyadicPartition& part, const SpectralField& u, const BesovIndex& idx) {
  require_same_grid(part.grid, u.grid);
  return triebel_lizorkin_impl(part, std::vector<const SpectralField*>{&u}, idx);
}

inline double triebel_lizorkin_norm(const DyadicPartition& part, const SpectralVectorField& v,
                                    const BesovIndex& idx) {
  return triebel_lizorkin_impl(part, components(v), idx);
}

}  // namespace hmhd
