#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmhd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DealiasRule { two_thirds, zero_pad_3halves };

inline const char* to_string(DealiasRule r) {
  return r == DealiasRule::two_thirds ? "two_thirds" : "zero_pad_3halves";
}

inline DealiasRule parse_dealias(const std::string& s) {
  if (s == "two_thirds") return DealiasRule::two_thirds;
  if (s == "zero_pad_3halves") return DealiasRule::zero_pad_3halves;
  throw ConfigError("unknown dealias rule '" + s + "'");
}

/// Periodic box [0, 2 pi L)^3 sampled by N points per axis. Frequencies are xi = k / L.
struct Grid {
  double L = 1.0;
  int N = 32;
  DealiasRule rule = DealiasRule::two_thirds;

  Grid() = default;
  Grid(double box_scale, int resolution, DealiasRule r = DealiasRule::two_thirds)
      : L(box_scale), N(resolution), rule(r) {
    validate();
  }

  void validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("box scale L must be positive");
    if (N < 4 || (N & (N - 1)) != 0)
      throw ConfigError("resolution N must be a power of two >= 4, got " + std::to_string(N));
  }

  std::size_t size() const { return std::size_t(N) * N * N; }
  std::size_t half_size() const { return std::size_t(N) * N * (N / 2 + 1); }

  std::size_t index(int i0, int i1, int i2) const {
    return (std::size_t(i0) * N + i1) * N + i2;
  }
  /// Integer wavenumber for array index i; the Nyquist index maps to -N/2.
  int wavenumber(int i) const { return i < N / 2 ? i : i - N; }
  int index_of(int k) const { return k >= 0 ? k : k + N; }
  double xi(int i) const { return wavenumber(i) / L; }

  /// Per-axis band kept by the 2/3 rule.
  int dealias_band() const { return N / 3; }
  double nyquist() const { return N / (2.0 * L); }
  /// Largest |xi| on the lattice.
  double xi_max() const { return std::sqrt(3.0) * N / (2.0 * L); }
  double cell_volume() const {
    const double h = 2.0 * M_PI * L / N;
    return h * h * h;
  }
  double volume() const {
    const double s = 2.0 * M_PI * L;
    return s * s * s;
  }
  /// Points per axis of the padded product grid.
  int padded_N() const { return rule == DealiasRule::zero_pad_3halves ? 3 * N / 2 : N; }

  bool operator==(const Grid& o) const { return L == o.L && N == o.N && rule == o.rule; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (a != b) throw ConfigError("fields live on different grids");
}

/// The same lattice on a box shrunk by lambda: u(lambda x) has the same coefficients.
inline Grid scaled_grid(const Grid& g, double lambda) { return Grid(g.L / lambda, g.N, g.rule); }

}  // namespace hmhd
