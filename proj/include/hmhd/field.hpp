#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <unordered_map>
#include <vector>

#include "grid.hpp"

namespace hmhd {

using cplx = std::complex<double>;

namespace detail {

// Recycles mid-sized aligned buffers; fresh pages cost more than the FFTs at 64^3.
class BufferPool {
 public:
  static constexpr std::size_t max_block = std::size_t(64) << 20;
  static constexpr std::size_t max_total = std::size_t(512) << 20;

  static BufferPool& instance() {
    static BufferPool* pool = new BufferPool();  // never destroyed: buffers may outlive statics
    return *pool;
  }

  void* get(std::size_t bytes) {
    if (bytes <= max_block) {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = free_.find(bytes);
      if (it != free_.end() && !it->second.empty()) {
        void* p = it->second.back();
        it->second.pop_back();
        total_ -= bytes;
        return p;
      }
    }
    return fftw_malloc(bytes);
  }

  void put(void* p, std::size_t bytes) noexcept {
    if (!p) return;
    if (bytes <= max_block) {
      std::lock_guard<std::mutex> lk(mu_);
      if (total_ + bytes <= max_total) {
        try {
          free_[bytes].push_back(p);
          total_ += bytes;
          return;
        } catch (...) {
        }
      }
    }
    fftw_free(p);
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::size_t, std::vector<void*>> free_;
  std::size_t total_ = 0;
};

}  // namespace detail

/// Allocator handing out fftw_malloc memory so every buffer has the alignment FFTW planned for.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = detail::BufferPool::instance().get(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t n) noexcept { detail::BufferPool::instance().put(p, n * sizeof(T)); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
  template <class U>
  bool operator!=(const FftwAllocator<U>&) const noexcept { return false; }
};

using cvec = std::vector<cplx, FftwAllocator<cplx>>;
using rvec = std::vector<double, FftwAllocator<double>>;

/// Fourier coefficients c_k of f(x) = sum_k c_k exp(i k.x / L), one per lattice point.
struct SpectralField {
  Grid grid;
  cvec c;
  bool real = true;             // coefficients are Hermitian symmetric
  bool has_mean = false;        // raw product output: zero mode may be nonzero
  bool mean_subtracted = false; // (-Lap)^{-1} removed a nonzero mean
  bool aliasing = false;        // an input exceeded the dealias band

  SpectralField() = default;
  explicit SpectralField(const Grid& g, bool is_real = true)
      : grid(g), c(g.size(), cplx(0.0, 0.0)), real(is_real) {}

  cplx& at(int i0, int i1, int i2) { return c[grid.index(i0, i1, i2)]; }
  const cplx& at(int i0, int i1, int i2) const { return c[grid.index(i0, i1, i2)]; }
  /// Coefficient at integer wavenumber (kx, ky, kz).
  cplx& mode(int kx, int ky, int kz) {
    return at(grid.index_of(kx), grid.index_of(ky), grid.index_of(kz));
  }
  const cplx& mode(int kx, int ky, int kz) const {
    return at(grid.index_of(kx), grid.index_of(ky), grid.index_of(kz));
  }
};

struct SpectralVectorField {
  std::array<SpectralField, 3> comp;

  SpectralVectorField() = default;
  explicit SpectralVectorField(const Grid& g, bool is_real = true)
      : comp{SpectralField(g, is_real), SpectralField(g, is_real), SpectralField(g, is_real)} {}
  SpectralVectorField(SpectralField a, SpectralField b, SpectralField c)
      : comp{std::move(a), std::move(b), std::move(c)} {
    require_same_grid(comp[0].grid, comp[1].grid);
    require_same_grid(comp[0].grid, comp[2].grid);
  }

  const Grid& grid() const { return comp[0].grid; }
  SpectralField& operator[](int i) { return comp[i]; }
  const SpectralField& operator[](int i) const { return comp[i]; }
  bool real() const { return comp[0].real && comp[1].real && comp[2].real; }
  bool aliasing() const { return comp[0].aliasing || comp[1].aliasing || comp[2].aliasing; }
};

inline SpectralField zeros_like(const SpectralField& f) { return SpectralField(f.grid, f.real); }
inline SpectralVectorField zeros_like(const SpectralVectorField& v) {
  return SpectralVectorField(v.grid(), v.real());
}

// --- coefficient arithmetic ---------------------------------------------------------------

inline SpectralField axpby(double a, const SpectralField& x, double b, const SpectralField& y) {
  require_same_grid(x.grid, y.grid);
  SpectralField out(x.grid, x.real && y.real);
  for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = a * x.c[i] + b * y.c[i];
  out.has_mean = x.has_mean || y.has_mean;
  out.aliasing = x.aliasing || y.aliasing;
  return out;
}

inline SpectralVectorField axpby(double a, const SpectralVectorField& x, double b,
                                 const SpectralVectorField& y) {
  return {axpby(a, x[0], b, y[0]), axpby(a, x[1], b, y[1]), axpby(a, x[2], b, y[2])};
}

inline SpectralField operator+(const SpectralField& x, const SpectralField& y) { return axpby(1, x, 1, y); }
inline SpectralField operator-(const SpectralField& x, const SpectralField& y) { return axpby(1, x, -1, y); }
inline SpectralField operator*(double a, const SpectralField& x) {
  SpectralField out = x;
  for (auto& v : out.c) v *= a;
  return out;
}
inline SpectralVectorField operator+(const SpectralVectorField& x, const SpectralVectorField& y) {
  return axpby(1, x, 1, y);
}
inline SpectralVectorField operator-(const SpectralVectorField& x, const SpectralVectorField& y) {
  return axpby(1, x, -1, y);
}
inline SpectralVectorField operator*(double a, const SpectralVectorField& x) {
  return {a * x[0], a * x[1], a * x[2]};
}

inline void add_to(SpectralField& acc, const SpectralField& x, double a = 1.0) {
  require_same_grid(acc.grid, x.grid);
  for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += a * x.c[i];
  acc.real = acc.real && x.real;
  acc.has_mean = acc.has_mean || x.has_mean;
  acc.aliasing = acc.aliasing || x.aliasing;
}
inline void add_to(SpectralVectorField& acc, const SpectralVectorField& x, double a = 1.0) {
  for (int i = 0; i < 3; ++i) add_to(acc[i], x[i], a);
}

/// Sum of |c_k|^2; the L2 norm squared over the box divided by its volume.
inline double coeff_energy(const SpectralField& f) {
  double s = 0.0;
  for (const auto& v : f.c) s += std::norm(v);
  return s;
}
inline double coeff_energy(const SpectralVectorField& v) {
  return coeff_energy(v[0]) + coeff_energy(v[1]) + coeff_energy(v[2]);
}

/// L2 norm over the box, by Parseval.
inline double l2_norm(const SpectralField& f) { return std::sqrt(f.grid.volume() * coeff_energy(f)); }
inline double l2_norm(const SpectralVectorField& v) {
  return std::sqrt(v.grid().volume() * coeff_energy(v));
}

inline double max_abs_coeff(const SpectralField& f) {
  double m = 0.0;
  for (const auto& v : f.c) m = std::max(m, std::norm(v));
  return std::sqrt(m);
}
inline double max_abs_coeff(const SpectralVectorField& v) {
  return std::max({max_abs_coeff(v[0]), max_abs_coeff(v[1]), max_abs_coeff(v[2])});
}

/// ||x - y||_2 / ||y||_2 over coefficients (0 when both vanish).
template <class F>
double rel_diff(const F& x, const F& y) {
  const double d = std::sqrt(coeff_energy(x - y));
  const double n = std::sqrt(coeff_energy(y));
  if (n == 0.0) return d;
  return d / n;
}

/// Field on a box shrunk by lambda with coefficients scaled by amp: amp * f(lambda x).
inline SpectralField rescale(const SpectralField& f, double lambda, double amp) {
  SpectralField out = amp * f;
  out.grid = scaled_grid(f.grid, lambda);
  return out;
}
inline SpectralVectorField rescale(const SpectralVectorField& v, double lambda, double amp) {
  return {rescale(v[0], lambda, amp), rescale(v[1], lambda, amp), rescale(v[2], lambda, amp)};
}

/// Worst violation of c(-k) = conj(c(k)) relative to the largest coefficient.
inline double hermitian_defect(const SpectralField& f) {
  const Grid& g = f.grid;
  const int N = g.N;
  double d = 0.0;
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        const cplx a = f.at(i0, i1, i2);
        const cplx b = f.at((N - i0) % N, (N - i1) % N, (N - i2) % N);
        d = std::max(d, std::abs(a - std::conj(b)));
      }
  const double m = max_abs_coeff(f);
  return m > 0 ? d / m : d;
}

}  // namespace hmhd
