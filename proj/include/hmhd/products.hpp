#pragma once

#include <array>

#include "fft.hpp"
#include "ops.hpp"

namespace hmhd {

namespace dealias {

/// Points per axis of the grid on which products are formed.
inline int product_N(const Grid& g) { return g.padded_N(); }

/// Largest |k_i| a product input may carry without aliasing into the kept band.
inline int input_band(const Grid& g) {
  return g.rule == DealiasRule::two_thirds ? g.dealias_band() : g.N / 2 - 1;
}

/// Largest |k_i| kept in a product output.
inline int output_band(const Grid& g) { return input_band(g); }

inline bool exceeds_band(const SpectralField& f) { return !within_band(f, input_band(f.grid)); }

/// Real samples of f on the product grid (N^3 for the 2/3 rule, (3N/2)^3 when padding).
inline rvec physical(const SpectralField& f, bool& alias) {
  alias = alias || f.aliasing || exceeds_band(f);
  const Grid& g = f.grid;
  if (g.rule == DealiasRule::two_thirds) return fft::transform_to_physical(f);
  const int N = g.N, M = product_N(g), nzM = M / 2 + 1, K = input_band(g);
  cvec h(fft::half_count(M));
  for (int i0 = 0; i0 < N; ++i0) {
    const int k0 = g.wavenumber(i0);
    if (std::abs(k0) > K) continue;
    const int j0 = k0 >= 0 ? k0 : k0 + M;
    for (int i1 = 0; i1 < N; ++i1) {
      const int k1 = g.wavenumber(i1);
      if (std::abs(k1) > K) continue;
      const int j1 = k1 >= 0 ? k1 : k1 + M;
      for (int k2 = 0; k2 <= K; ++k2) h[(std::size_t(j0) * M + j1) * nzM + k2] = f.at(i0, i1, k2);
    }
  }
  return fft::c2r(std::move(h), M);
}

inline std::array<rvec, 3> physical(const SpectralVectorField& v, bool& alias) {
  return {physical(v[0], alias), physical(v[1], alias), physical(v[2], alias)};
}

/// Normalized half spectrum on the N grid of product-grid samples, truncated to the output band.
/// The zero mode (mean) is kept.
inline cvec spectral_half(const rvec& samples, const Grid& g) {
  const int N = g.N, M = product_N(g), nz = N / 2 + 1, K = output_band(g);
  const cvec hm = fft::r2c(samples, M);
  const double s = 1.0 / (double(M) * M * M);
  cvec h(fft::half_count(N));
  const int nzM = M / 2 + 1;
  for (int i0 = 0; i0 < N; ++i0) {
    const int k0 = g.wavenumber(i0);
    if (std::abs(k0) > K) continue;
    const int j0 = k0 >= 0 ? k0 : k0 + M;
    for (int i1 = 0; i1 < N; ++i1) {
      const int k1 = g.wavenumber(i1);
      if (std::abs(k1) > K) continue;
      const int j1 = k1 >= 0 ? k1 : k1 + M;
      const cplx* src = &hm[(std::size_t(j0) * M + j1) * nzM];
      cplx* dst = &h[(std::size_t(i0) * N + i1) * nz];
      for (int k2 = 0; k2 <= K; ++k2) dst[k2] = s * src[k2];
    }
  }
  return h;
}

inline SpectralField spectral_full(const rvec& samples, const Grid& g, bool alias) {
  SpectralField f = fft::expand(spectral_half(samples, g), g);
  f.has_mean = true;
  f.aliasing = alias;
  return f;
}

// complex fallback for fields without Hermitian symmetry
inline cvec physical_complex(const SpectralField& f, bool& alias) {
  alias = alias || f.aliasing || exceeds_band(f);
  const Grid& g = f.grid;
  const int N = g.N, M = product_N(g), K = input_band(g);
  if (M == N) return fft::transform_to_physical_complex(f);
  cvec a(std::size_t(M) * M * M);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (std::abs(k0) > K || std::abs(k1) > K || std::abs(k2) > K) return;
    auto j = [M](int k) { return k >= 0 ? k : k + M; };
    a[(std::size_t(j(k0)) * M + j(k1)) * M + j(k2)] = f.c[i];
  });
  fft::c2c(a, M, false);
  return a;
}

inline SpectralField spectral_complex(cvec&& a, const Grid& g, bool alias) {
  const int M = product_N(g), K = output_band(g);
  fft::c2c(a, M, true);
  const double s = 1.0 / (double(M) * M * M);
  SpectralField f(g, false);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (std::abs(k0) > K || std::abs(k1) > K || std::abs(k2) > K) return;
    auto j = [M](int k) { return k >= 0 ? k : k + M; };
    f.c[i] = s * a[(std::size_t(j(k0)) * M + j(k1)) * M + j(k2)];
  });
  f.has_mean = true;
  f.aliasing = alias;
  return f;
}

/// Applies coefficient-wise fn(half index, kx, ky, kz) over an N-grid half spectrum.
template <class Fn>
void for_each_half_mode(const Grid& g, Fn&& fn) {
  const int N = g.N, nz = N / 2 + 1;
  std::size_t idx = 0;
  for (int i0 = 0; i0 < N; ++i0) {
    const int k0 = g.wavenumber(i0);
    for (int i1 = 0; i1 < N; ++i1) {
      const int k1 = g.wavenumber(i1);
      for (int k2 = 0; k2 < nz; ++k2, ++idx) fn(idx, k0, k1, k2 == N / 2 ? -k2 : k2);
    }
  }
}

}  // namespace dealias

/// a*b with dealiasing per grid.dealias_rule; the mean of the product is kept.
inline SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid);
  bool alias = false;
  if (a.real && b.real) {
    rvec pa = dealias::physical(a, alias);
    const rvec pb = dealias::physical(b, alias);
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    return dealias::spectral_full(pa, a.grid, alias);
  }
  cvec pa = dealias::physical_complex(a, alias);
  const cvec pb = dealias::physical_complex(b, alias);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  return dealias::spectral_complex(std::move(pa), a.grid, alias);
}

using TensorField = std::array<std::array<SpectralField, 3>, 3>;

/// T[a][b] = u_a v_b.
inline TensorField tensor_product(const SpectralVectorField& u, const SpectralVectorField& v) {
  TensorField T;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) T[a][b] = pointwise_product(u[a], v[b]);
  return T;
}

inline SpectralVectorField cross_product(const SpectralVectorField& u, const SpectralVectorField& v) {
  require_same_grid(u.grid(), v.grid());
  bool alias = false;
  if (u.real() && v.real()) {
    const auto pu = dealias::physical(u, alias);
    const auto pv = dealias::physical(v, alias);
    SpectralVectorField out;
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      rvec w(pu[0].size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = pu[b][i] * pv[c][i] - pu[c][i] * pv[b][i];
      out[a] = dealias::spectral_full(w, u.grid(), alias);
    }
    return out;
  }
  SpectralVectorField out;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    out[a] = pointwise_product(u[b], v[c]) - pointwise_product(u[c], v[b]);
    out[a].has_mean = true;
  }
  return out;
}

/// div(T) with (div T)_a = sum_b d_b T[a][b].
inline SpectralVectorField tensor_divergence(const TensorField& T) {
  SpectralVectorField out;
  for (int a = 0; a < 3; ++a) out[a] = divergence({T[a][0], T[a][1], T[a][2]});
  return out;
}

/// (z . grad) w, formed as products z_b d_b w_a.
inline SpectralVectorField advect(const SpectralVectorField& z, const SpectralVectorField& w) {
  SpectralVectorField out(w.grid(), z.real() && w.real());
  for (int a = 0; a < 3; ++a) {
    out[a].has_mean = true;
    for (int b = 0; b < 3; ++b) add_to(out[a], pointwise_product(z[b], derivative(w[a], b)));
  }
  return out;
}

}  // namespace hmhd
