#pragma once

#include "../products.hpp"

namespace hmhd {

/// N(u, v) = -(-mu Lap)^{-1} P div(u (x) v), with (div(u (x) v))_a = sum_b d_b (u_a v_b).
inline SpectralVectorField ns_bilinear(const SpectralVectorField& u, const SpectralVectorField& v, double mu) {
  require_same_grid(u.grid(), v.grid());
  if (!(mu > 0)) throw ConfigError("viscosity mu must be positive");
  if (!u.real() || !v.real()) throw ConfigError("ns_bilinear needs real fields");
  const Grid& g = u.grid();
  const bool same = &u == &v;
  bool alias = false;
  const auto pu = dealias::physical(u, alias);
  std::array<rvec, 3> pv_store;
  if (!same) pv_store = dealias::physical(v, alias);
  const auto& pv = same ? pu : pv_store;

  std::array<cvec, 3> D;
  for (auto& d : D) d.assign(fft::half_count(g.N), cplx(0, 0));
  rvec w(pu[0].size());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (same && b < a) continue;  // u_a u_b is symmetric; reuse it for both orderings
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = pu[a][i] * pv[b][i];
      const cvec h = dealias::spectral_half(w, g);
      dealias::for_each_half_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        const int k[3] = {k0, k1, k2};
        D[a][i] += detail::ik(g, k[b]) * h[i];
        if (same && b != a) D[b][i] += detail::ik(g, k[a]) * h[i];
      });
    }
  dealias::for_each_half_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    const double x[3] = {double(k0), double(k1), double(k2)};
    const double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if (n2 == 0.0) {
      for (auto& d : D) d[i] = 0.0;
      return;
    }
    const cplx dot = (x[0] * D[0][i] + x[1] * D[1][i] + x[2] * D[2][i]) / n2;
    const double m = -(g.L * g.L) / (mu * n2);
    for (int a = 0; a < 3; ++a) D[a][i] = m * (D[a][i] - x[a] * dot);
  });
  SpectralVectorField out;
  for (int a = 0; a < 3; ++a) {
    out[a] = fft::expand(D[a], g);
    D[a] = cvec();
    out[a].aliasing = alias;
  }
  return out;
}

}  // namespace hmhd
