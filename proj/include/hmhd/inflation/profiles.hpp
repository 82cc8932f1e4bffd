#pragma once

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "../random.hpp"

namespace hmhd {

/// theta-hat: 1 on |xi| <= a, 0 on |xi| >= 2a, smooth step between; the bump phi_bump is
/// theta(x1) theta(x2) theta(x3) sin(17 x3 / 24).
struct ThetaProfile {
  double a = 0.6;

  double hat(double xi) const {
    const double t = std::abs(xi);
    if (t <= a) return 1.0;
    if (t >= 2 * a) return 0.0;
    return 1.0 - detail::smooth_step((t - a) / a);
  }

  /// Fourier transform of phi_bump at eta.
  std::complex<double> phi_hat(double e1, double e2, double e3) const {
    constexpr double w = 17.0 / 24.0;
    const double h12 = hat(e1) * hat(e2);
    if (h12 == 0.0) return 0.0;
    return h12 * (hat(e3 - w) - hat(e3 + w)) / std::complex<double>(0, 2);
  }
};

/// theta(t) sampled from theta-hat by one long 1-D FFT: theta(t) = (1/2pi) int theta-hat(xi) e^{i t xi} dxi.
struct ThetaSamples {
  double dt = 0;
  std::vector<double> t, v;  // t in increasing order
};

inline ThetaSamples sample_theta(const ThetaProfile& prof, int log2n = 20, int per_a = 4096) {
  const std::size_t n = std::size_t(1) << log2n;
  const double dxi = prof.a / per_a;
  fftw_complex* buf = fftw_alloc_complex(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double xi = (j < n / 2 ? double(j) : double(j) - double(n)) * dxi;
    buf[j][0] = prof.hat(xi);
    buf[j][1] = 0.0;
  }
  fftw_plan p;
  {
    static std::mutex plan_mu;
    std::lock_guard<std::mutex> lk(plan_mu);
    p = fftw_plan_dft_1d(int(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(p);
  ThetaSamples s;
  s.dt = 2 * M_PI / (double(n) * dxi);
  s.t.resize(n);
  s.v.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t src = (m + n / 2) % n;  // reorder to increasing t
    const double tm = (src < n / 2 ? double(src) : double(src) - double(n)) * s.dt;
    s.t[m] = tm;
    s.v[m] = buf[src][0] * dxi / (2 * M_PI);
  }
  {
    static std::mutex plan_mu;
    std::lock_guard<std::mutex> lk(plan_mu);
    fftw_destroy_plan(p);
  }
  fftw_free(buf);
  return s;
}

/// Cached theta samples per threshold a.
inline const ThetaSamples& theta_samples(double a) {
  static std::mutex mu;
  static std::map<double, ThetaSamples> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(a);
  if (it == cache.end()) it = cache.emplace(a, sample_theta(ThetaProfile{a})).first;
  return it->second;
}

/// Mean of |sin|^p over a period.
inline double mean_abs_sin_pow(double p) {
  return std::tgamma((p + 1) / 2) / (std::sqrt(M_PI) * std::tgamma(p / 2 + 1));
}

/// int |theta|^p and int |theta(t) sin(17 t / 24)|^p over |t| > cut (cut = 0 gives the full integral).
struct ThetaIntegrals {
  double I1 = 0, I3 = 0;
};

inline ThetaIntegrals theta_integrals(double a, double p, double cut = 0.0) {
  const ThetaSamples& s = theta_samples(a);
  ThetaIntegrals r;
  for (std::size_t m = 0; m < s.t.size(); ++m) {
    if (std::abs(s.t[m]) < cut) continue;
    const double th = std::abs(s.v[m]);
    r.I1 += std::pow(th, p);
    r.I3 += std::pow(th * std::abs(std::sin(17.0 / 24.0 * s.t[m])), p);
  }
  r.I1 *= s.dt;
  r.I3 *= s.dt;
  return r;
}

}  // namespace hmhd
