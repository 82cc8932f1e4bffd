#pragma once

#include <cmath>
#include <limits>

#include "fft.hpp"

namespace hmhd {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Rectangle-rule L^p norm over the box from samples of |f|.
inline double lp_from_abs_samples(const rvec& a, double p, double dV) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 2.0)
    for (double v : a) s += v * v;
  else if (p == 1.0)
    for (double v : a) s += std::abs(v);
  else if (p == 3.0)
    for (double v : a) s += std::abs(v) * v * v;
  else
    for (double v : a) s += std::pow(std::abs(v), p);
  return std::pow(s * dV, 1.0 / p);
}

inline double lp_norm(const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw ConfigError("L^p norm needs p >= 1");
  if (p == 2.0) return l2_norm(f);
  if (f.real) return lp_from_abs_samples(fft::transform_to_physical(f), p, f.grid.cell_volume());
  const cvec s = fft::transform_to_physical_complex(f);
  rvec a(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) a[i] = std::abs(s[i]);
  return lp_from_abs_samples(a, p, f.grid.cell_volume());
}

/// Pointwise Euclidean magnitude of a vector field on the grid.
inline rvec magnitude_samples(const SpectralVectorField& v) {
  rvec m(v.grid().size(), 0.0);
  for (int a = 0; a < 3; ++a) {
    if (v[a].real) {
      const rvec s = fft::transform_to_physical(v[a]);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += s[i] * s[i];
    } else {
      const cvec s = fft::transform_to_physical_complex(v[a]);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += std::norm(s[i]);
    }
  }
  for (auto& x : m) x = std::sqrt(x);
  return m;
}

inline double lp_norm(const SpectralVectorField& v, double p) {
  if (!(p >= 1.0)) throw ConfigError("L^p norm needs p >= 1");
  if (p == 2.0) return l2_norm(v);
  return lp_from_abs_samples(magnitude_samples(v), p, v.grid().cell_volume());
}

}  // namespace hmhd
