#pragma once

#include <cmath>
#include <random>

#include "ops.hpp"

namespace hmhd {

namespace detail {
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}
}  // namespace detail

/// Random real mean-zero field: Gaussian coefficients with envelope |k|^{-beta}, tapered
/// smoothly from 1 at |k| = K/2 to 0 at |k| = K. Normalized to unit coefficient energy.
inline SpectralField random_field(const Grid& g, std::mt19937_64& rng, double beta, int K) {
  std::normal_distribution<double> nd(0.0, 1.0);
  SpectralField raw(g, false);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    const double re = nd(rng), im = nd(rng);
    const double k = std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
    if (i == 0 || k >= K) return;
    const double taper = 1.0 - detail::smooth_step((k / K - 0.5) / 0.5);
    raw.c[i] = cplx(re, im) * std::pow(k, -beta) * taper;
  });
  SpectralField f = real_part_symmetrize(raw);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (k0 == -g.N / 2 || k1 == -g.N / 2 || k2 == -g.N / 2) f.c[i] = 0.0;
  });
  const double e = std::sqrt(coeff_energy(f));
  if (e > 0) f = (1.0 / e) * f;
  return f;
}

inline SpectralVectorField random_vector_field(const Grid& g, std::mt19937_64& rng, double beta, int K,
                                               bool divergence_free) {
  SpectralVectorField v(random_field(g, rng, beta, K), random_field(g, rng, beta, K),
                        random_field(g, rng, beta, K));
  if (divergence_free) v = leray_project(v);
  const double e = std::sqrt(coeff_energy(v));
  return e > 0 ? (1.0 / e) * v : v;
}

/// Default ensemble band: the 2/3 dealias band of the grid.
inline int default_band(const Grid& g) { return g.dealias_band(); }

}  // namespace hmhd
