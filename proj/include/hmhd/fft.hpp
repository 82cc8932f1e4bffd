#pragma once

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "field.hpp"

namespace hmhd::fft {

namespace detail {

enum class Kind { c2c_forward, c2c_backward, r2c, c2r };

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, Kind, int>, fftw_plan> plans;
  int threads = 1;
  bool threads_ready = false;
  ~PlanCache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }
};

inline PlanCache& cache() {
  static PlanCache c;
  return c;
}

// Plans are made with FFTW_ESTIMATE on the caller's first buffers (ESTIMATE never touches
// the data) and reused through the new-array execute interface.
inline fftw_plan get_plan(int n, Kind kind, void* in, void* out) {
  auto& pc = cache();
  std::lock_guard<std::mutex> lock(pc.mutex);
  const auto key = std::make_tuple(n, kind, pc.threads);
  auto it = pc.plans.find(key);
  if (it != pc.plans.end()) return it->second;
  if (pc.threads_ready) fftw_plan_with_nthreads(pc.threads);
  fftw_plan p = nullptr;
  switch (kind) {
    case Kind::c2c_forward:
      p = fftw_plan_dft_3d(n, n, n, static_cast<fftw_complex*>(in), static_cast<fftw_complex*>(out),
                           FFTW_FORWARD, FFTW_ESTIMATE);
      break;
    case Kind::c2c_backward:
      p = fftw_plan_dft_3d(n, n, n, static_cast<fftw_complex*>(in), static_cast<fftw_complex*>(out),
                           FFTW_BACKWARD, FFTW_ESTIMATE);
      break;
    case Kind::r2c:
      p = fftw_plan_dft_r2c_3d(n, n, n, static_cast<double*>(in), static_cast<fftw_complex*>(out),
                               FFTW_ESTIMATE);
      break;
    case Kind::c2r:
      p = fftw_plan_dft_c2r_3d(n, n, n, static_cast<fftw_complex*>(in), static_cast<double*>(out),
                               FFTW_ESTIMATE);
      break;
  }
  if (!p) throw std::runtime_error("FFTW planning failed");
  pc.plans.emplace(key, p);
  return p;
}

inline fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// Number of threads used inside transforms planned from now on.
inline void set_threads(int k) {
  auto& pc = detail::cache();
  std::lock_guard<std::mutex> lock(pc.mutex);
  if (k < 1) throw ConfigError("thread count must be >= 1");
  if (!pc.threads_ready) {
    fftw_init_threads();
    pc.threads_ready = true;
  }
  pc.threads = k;
}

inline std::size_t half_count(int n) { return std::size_t(n) * n * (n / 2 + 1); }

/// In-place unnormalized c2c transform of an n^3 array; sign +1 synthesizes samples.
inline void c2c(cvec& a, int n, bool forward) {
  auto kind = forward ? detail::Kind::c2c_forward : detail::Kind::c2c_backward;
  fftw_plan p = detail::get_plan(n, kind, a.data(), a.data());
  fftw_execute_dft(p, detail::fc(a.data()), detail::fc(a.data()));
}

/// Unnormalized r2c of n^3 real samples into n*n*(n/2+1) coefficients.
inline cvec r2c(const rvec& samples, int n) {
  cvec out(half_count(n));
  rvec& in = const_cast<rvec&>(samples);  // r2c with FFTW_ESTIMATE leaves the input intact
  fftw_plan p = detail::get_plan(n, detail::Kind::r2c, in.data(), out.data());
  fftw_execute_dft_r2c(p, in.data(), detail::fc(out.data()));
  return out;
}

/// Unnormalized c2r; consumes the half spectrum.
inline rvec c2r(cvec&& half, int n) {
  rvec out(std::size_t(n) * n * n);
  fftw_plan p = detail::get_plan(n, detail::Kind::c2r, half.data(), out.data());
  fftw_execute_dft_c2r(p, detail::fc(half.data()), out.data());
  half = cvec();
  return out;
}

/// Half spectrum (last axis 0..N/2) of a full coefficient array.
inline cvec contract(const SpectralField& f) {
  const int N = f.grid.N, nz = N / 2 + 1;
  cvec h(half_count(N));
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1)
      std::memcpy(&h[(std::size_t(i0) * N + i1) * nz], &f.c[f.grid.index(i0, i1, 0)],
                  sizeof(cplx) * nz);
  return h;
}

/// Full Hermitian coefficient array from a half spectrum.
inline SpectralField expand(const cvec& h, const Grid& g) {
  const int N = g.N, nz = N / 2 + 1;
  SpectralField f(g, true);
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1) {
      const cplx* row = &h[(std::size_t(i0) * N + i1) * nz];
      std::memcpy(&f.c[g.index(i0, i1, 0)], row, sizeof(cplx) * nz);
      const cplx* mirror = &h[(std::size_t((N - i0) % N) * N + (N - i1) % N) * nz];
      for (int i2 = nz; i2 < N; ++i2) f.c[g.index(i0, i1, i2)] = std::conj(mirror[N - i2]);
    }
  return f;
}

// --- spec-facing transforms ------------------------------------------------------------------

/// Samples f(x_j) on the N^3 grid, x_j = 2 pi L j / N (complex path, any field).
inline cvec transform_to_physical_complex(const SpectralField& f) {
  cvec a = f.c;
  c2c(a, f.grid.N, false);
  return a;
}

/// Real samples of a Hermitian field (c2r path).
inline rvec transform_to_physical(const SpectralField& f) {
  if (!f.real) throw ConfigError("real-sample transform requested for a non-real field");
  return c2r(contract(f), f.grid.N);
}

inline SpectralField transform_to_spectral(const Grid& g, const cvec& samples, bool keep_mean = false) {
  if (samples.size() != g.size())
    throw ConfigError("sample array has " + std::to_string(samples.size()) + " entries, grid needs " +
                      std::to_string(g.size()));
  SpectralField f(g, false);
  f.c = samples;
  c2c(f.c, g.N, true);
  const double s = 1.0 / double(g.size());
  for (auto& v : f.c) v *= s;
  if (!keep_mean) f.c[0] = 0.0;
  f.has_mean = keep_mean;
  return f;
}

inline SpectralField transform_to_spectral(const Grid& g, const rvec& samples, bool keep_mean = false) {
  if (samples.size() != g.size())
    throw ConfigError("sample array has " + std::to_string(samples.size()) + " entries, grid needs " +
                      std::to_string(g.size()));
  cvec h = r2c(samples, g.N);
  const double s = 1.0 / double(g.size());
  for (auto& v : h) v *= s;
  SpectralField f = expand(h, g);
  if (!keep_mean) f.c[0] = 0.0;
  f.has_mean = keep_mean;
  return f;
}

}  // namespace hmhd::fft
