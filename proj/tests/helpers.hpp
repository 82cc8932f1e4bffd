#pragma once

#include <hmhd/hmhd.hpp>

#include <random>

namespace testing_support {

using namespace hmhd;

inline SpectralField rand_scalar(const Grid& g, std::uint64_t seed, double beta = 1.0) {
  std::mt19937_64 rng(seed);
  return random_field(g, rng, beta, g.dealias_band());
}

inline SpectralVectorField rand_vector(const Grid& g, std::uint64_t seed, bool div_free, double beta = 1.0) {
  std::mt19937_64 rng(seed);
  return random_vector_field(g, rng, beta, g.dealias_band(), div_free);
}

/// Single real mode amp*sin(k.x/L) or amp*cos(k.x/L).
inline SpectralField trig_mode(const Grid& g, int kx, int ky, int kz, bool sine, double amp = 1.0) {
  SpectralField f(g, true);
  if (sine) {
    f.mode(kx, ky, kz) += amp / cplx(0, 2);
    f.mode(-kx, -ky, -kz) -= amp / cplx(0, 2);
  } else {
    f.mode(kx, ky, kz) += amp / 2.0;
    f.mode(-kx, -ky, -kz) += amp / 2.0;
  }
  return f;
}

/// Direct O(N^6) synthesis f(x_j) = sum_k c_k exp(i k.x_j / L), independent of FFTW.
inline cvec direct_synthesis(const SpectralField& f) {
  const Grid& g = f.grid;
  const int N = g.N;
  cvec out(g.size());
  for (int j0 = 0; j0 < N; ++j0)
    for (int j1 = 0; j1 < N; ++j1)
      for (int j2 = 0; j2 < N; ++j2) {
        cplx s = 0;
        for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
          if (f.c[i] == cplx(0, 0)) return;
          const double ph = 2 * M_PI * (double(k0) * j0 + double(k1) * j1 + double(k2) * j2) / N;
          s += f.c[i] * cplx(std::cos(ph), std::sin(ph));
        });
        out[g.index(j0, j1, j2)] = s;
      }
  return out;
}

inline double max_abs(const cvec& a) {
  double m = 0;
  for (auto v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace testing_support
