#pragma once

#include <array>
#include <cmath>
#include <sstream>

#include "field.hpp"

namespace hmhd {

using Xi = std::array<double, 3>;

/// Calls fn(linear index, kx, ky, kz) for every lattice point.
template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  const int N = g.N;
  std::size_t idx = 0;
  for (int i0 = 0; i0 < N; ++i0) {
    const int k0 = g.wavenumber(i0);
    for (int i1 = 0; i1 < N; ++i1) {
      const int k1 = g.wavenumber(i1);
      for (int i2 = 0; i2 < N; ++i2, ++idx) fn(idx, k0, k1, g.wavenumber(i2));
    }
  }
}

/// coeffs(xi) -> m(xi) coeffs(xi) on every nonzero lattice frequency; the zero mode stays 0.
/// `preserves_reality` declares m(-xi) = conj(m(xi)).
template <class M>
SpectralField apply_multiplier(const SpectralField& f, M&& m, bool preserves_reality = false) {
  const Grid& g = f.grid;
  SpectralField out(g, f.real && preserves_reality);
  out.aliasing = f.aliasing;
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    const Xi xi{k0 / g.L, k1 / g.L, k2 / g.L};
    const cplx v = m(xi);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "multiplier is not finite at xi = (" << xi[0] << ", " << xi[1] << ", " << xi[2] << ")";
      throw DomainError(os.str());
    }
    out.c[i] = v * f.c[i];
  });
  return out;
}

namespace detail {
// i xi_axis with the Nyquist plane dropped so real fields stay real.
inline cplx ik(const Grid& g, int k) { return k == -g.N / 2 ? cplx(0, 0) : cplx(0, k / g.L); }
inline double xi2(const Grid& g, int k0, int k1, int k2) {
  return (double(k0) * k0 + double(k1) * k1 + double(k2) * k2) / (g.L * g.L);
}
}  // namespace detail

inline SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis > 2) throw ConfigError("axis must be 0, 1 or 2");
  const Grid& g = f.grid;
  SpectralField out(g, f.real);
  out.aliasing = f.aliasing;
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    const int k = axis == 0 ? k0 : axis == 1 ? k1 : k2;
    out.c[i] = detail::ik(g, k) * f.c[i];
  });
  out.c[0] = 0.0;
  return out;
}

inline SpectralField laplacian(const SpectralField& f) {
  const Grid& g = f.grid;
  SpectralField out(g, f.real);
  out.aliasing = f.aliasing;
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    out.c[i] = -detail::xi2(g, k0, k1, k2) * f.c[i];
  });
  return out;
}

/// Multiplier -1/|xi|^2. A nonzero mean (raw product input) is dropped and recorded.
inline SpectralField inverse_laplacian(const SpectralField& f) {
  const Grid& g = f.grid;
  SpectralField out(g, f.real);
  out.aliasing = f.aliasing;
  out.mean_subtracted = f.c[0] != cplx(0.0, 0.0);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    out.c[i] = -f.c[i] / detail::xi2(g, k0, k1, k2);
  });
  return out;
}

inline SpectralVectorField laplacian(const SpectralVectorField& v) {
  return {laplacian(v[0]), laplacian(v[1]), laplacian(v[2])};
}
inline SpectralVectorField inverse_laplacian(const SpectralVectorField& v) {
  return {inverse_laplacian(v[0]), inverse_laplacian(v[1]), inverse_laplacian(v[2])};
}

inline SpectralField divergence(const SpectralVectorField& v) {
  const Grid& g = v.grid();
  SpectralField out(g, v.real());
  out.aliasing = v.aliasing();
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    out.c[i] = detail::ik(g, k0) * v[0].c[i] + detail::ik(g, k1) * v[1].c[i] +
               detail::ik(g, k2) * v[2].c[i];
  });
  out.c[0] = 0.0;
  return out;
}

inline SpectralVectorField gradient(const SpectralField& s) {
  return {derivative(s, 0), derivative(s, 1), derivative(s, 2)};
}

inline SpectralVectorField curl(const SpectralVectorField& v) {
  const Grid& g = v.grid();
  SpectralVectorField out(g, v.real());
  for (int a = 0; a < 3; ++a) out[a].aliasing = v.aliasing();
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    const cplx d0 = detail::ik(g, k0), d1 = detail::ik(g, k1), d2 = detail::ik(g, k2);
    const cplx a = v[0].c[i], b = v[1].c[i], c = v[2].c[i];
    out[0].c[i] = d1 * c - d2 * b;
    out[1].c[i] = d2 * a - d0 * c;
    out[2].c[i] = d0 * b - d1 * a;
  });
  for (int a = 0; a < 3; ++a) out[a].c[0] = 0.0;
  return out;
}

/// Mode-wise (I - xi xi^T / |xi|^2); the zero mode is annihilated.
inline SpectralVectorField leray_project(const SpectralVectorField& v) {
  const Grid& g = v.grid();
  SpectralVectorField out(g, v.real());
  for (int a = 0; a < 3; ++a) out[a].aliasing = v.aliasing();
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    const double x[3] = {double(k0), double(k1), double(k2)};
    const double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const cplx dot = (x[0] * v[0].c[i] + x[1] * v[1].c[i] + x[2] * v[2].c[i]) / n2;
    for (int a = 0; a < 3; ++a) out[a].c[i] = v[a].c[i] - x[a] * dot;
  });
  return out;
}

/// curl^{-1} = (-Lap)^{-1} curl.
inline SpectralVectorField biot_savart(const SpectralVectorField& J) {
  const Grid& g = J.grid();
  SpectralVectorField out(g, J.real());
  for (int a = 0; a < 3; ++a) out[a].aliasing = J.aliasing();
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (i == 0) return;
    const double n2 = detail::xi2(g, k0, k1, k2);
    const cplx d0 = detail::ik(g, k0), d1 = detail::ik(g, k1), d2 = detail::ik(g, k2);
    const cplx a = J[0].c[i], b = J[1].c[i], c = J[2].c[i];
    out[0].c[i] = (d1 * c - d2 * b) / n2;
    out[1].c[i] = (d2 * a - d0 * c) / n2;
    out[2].c[i] = (d0 * b - d1 * a) / n2;
  });
  return out;
}

namespace detail {
inline bool in_annulus(const Grid& g, int k0, int k1, int k2, double n) {
  const double x2 = xi2(g, k0, k1, k2);
  const double tol = 1e-12;
  return x2 >= (1.0 / (n * n)) * (1.0 - tol) && x2 <= n * n * (1.0 + tol);
}
}  // namespace detail

/// Keeps the closed annulus 1/n <= |xi| <= n.
inline SpectralField spectral_cutoff(const SpectralField& f, double n) {
  const Grid& g = f.grid;
  if (!(n > 0)) throw ConfigError("cutoff n must be positive");
  if (n < 1.0 / g.L * (1 - 1e-12))
    throw ConfigError("cutoff n is below the smallest lattice frequency 1/L");
  SpectralField out(g, f.real);
  out.aliasing = f.aliasing;
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (i != 0 && detail::in_annulus(g, k0, k1, k2, n)) out.c[i] = f.c[i];
  });
  return out;
}

inline SpectralVectorField spectral_cutoff(const SpectralVectorField& v, double n) {
  return {spectral_cutoff(v[0], n), spectral_cutoff(v[1], n), spectral_cutoff(v[2], n)};
}

/// Zeroes every mode with some |k_i| > K.
inline SpectralField truncate_to_band(const SpectralField& f, int K) {
  SpectralField out(f.grid, f.real);
  out.aliasing = f.aliasing;
  for_each_mode(f.grid, [&](std::size_t i, int k0, int k1, int k2) {
    if (std::abs(k0) <= K && std::abs(k1) <= K && std::abs(k2) <= K) out.c[i] = f.c[i];
  });
  out.c[0] = f.c[0];
  return out;
}

inline SpectralVectorField truncate_to_band(const SpectralVectorField& v, int K) {
  return {truncate_to_band(v[0], K), truncate_to_band(v[1], K), truncate_to_band(v[2], K)};
}

/// True when every nonzero coefficient sits inside |k_i| <= K.
inline bool within_band(const SpectralField& f, int K) {
  const Grid& g = f.grid;
  if (K >= g.N / 2) return true;
  double out = 0.0, in = 0.0;
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    const double a = std::norm(f.c[i]);
    if (std::abs(k0) > K || std::abs(k1) > K || std::abs(k2) > K)
      out = std::max(out, a);
    else
      in = std::max(in, a);
  });
  return out <= 1e-28 * std::max(in, out);
}

/// ||div v|| / (|xi|-weighted size of v), the relative divergence used to certify div-free flags.
inline double relative_divergence(const SpectralVectorField& v) {
  const Grid& g = v.grid();
  double num = 0.0, den = 0.0;
  const SpectralField d = divergence(v);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    num += std::norm(d.c[i]);
    const double x2 = detail::xi2(g, k0, k1, k2);
    den += x2 * (std::norm(v[0].c[i]) + std::norm(v[1].c[i]) + std::norm(v[2].c[i]));
  });
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline SpectralField real_part_symmetrize(const SpectralField& f) {
  const Grid& g = f.grid;
  const int N = g.N;
  SpectralField out(g, true);
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2)
        out.at(i0, i1, i2) =
            0.5 * (f.at(i0, i1, i2) + std::conj(f.at((N - i0) % N, (N - i1) % N, (N - i2) % N)));
  out.c[0] = 0.0;
  return out;
}

}  // namespace hmhd
