#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../lp/besov.hpp"
#include "ns.hpp"
#include "profiles.hpp"

namespace hmhd {

enum class BlockRule { paper_8N, relaxed_all_k };

inline const char* to_string(BlockRule b) { return b == BlockRule::paper_8N ? "paper_8N" : "relaxed_all_k"; }
inline BlockRule parse_block_rule(const std::string& s) {
  if (s == "paper_8N") return BlockRule::paper_8N;
  if (s == "relaxed_all_k") return BlockRule::relaxed_all_k;
  throw ConfigError("unknown block rule '" + s + "'");
}

struct InflationConfig {
  int n = 6;
  double epsilon = 1.0;
  BlockRule block_rule = BlockRule::relaxed_all_k;
  int relaxed_gap = 3;    // relaxed set: the relaxed_width integers ending at n - relaxed_gap
  int relaxed_width = 2;
  double theta_a = 0.6;   // theta-hat thresholds a and 2a
  int N = 256;
  std::optional<int> recenter_shift;  // box side 2 pi 2^shift; chosen from the band when unset
  double mu = 1.0;
  double min_separation = 8.0;  // atom separation in envelope widths
  double max_overlap = 0.1;     // aggregation tolerance for the semianalytic norms

  double r() const { return 3.0 / (2.0 + epsilon); }

  void validate() const {
    if (n < 1) throw ConfigError("inflation index n must be positive");
    if (!(epsilon > 0 && epsilon <= 1)) throw ConfigError("epsilon must lie in (0, 1]");
    if (!(theta_a > 0)) throw ConfigError("theta threshold must be positive");
    if (relaxed_width < 1 || relaxed_gap < 1) throw ConfigError("relaxed block window must be positive");
    Grid(1.0, N).validate();
  }
};

/// paper_8N: {k in 8N : n/4 <= k <= n/2}; relaxed: {n - gap - width + 1, ..., n - gap}, positive k only.
inline std::vector<int> block_set(const InflationConfig& cfg) {
  std::vector<int> ks;
  if (cfg.block_rule == BlockRule::paper_8N) {
    for (int k = 8; 4 * k <= 2 * cfg.n; k += 8)
      if (4 * k >= cfg.n) ks.push_back(k);
  } else {
    for (int k = cfg.n - cfg.relaxed_gap - cfg.relaxed_width + 1; k <= cfg.n - cfg.relaxed_gap; ++k)
      if (k >= 1) ks.push_back(k);
  }
  return ks;
}

struct AtomSpec {
  int k = 0;
  std::array<double, 3> center{};
  double carrier = 0;                     // (17/12) 2^n along e
  std::array<double, 3> A_diag{};         // (eps, eps, 1)
  double amplitude = 0;                   // n^{-1/(2r)} 2^k
};

inline const std::array<double, 3>& carrier_direction() {
  static const std::array<double, 3> e{std::sqrt(0.5), std::sqrt(0.5), 0.0};
  return e;
}

struct DeskLayout {
  bool feasible = false;
  std::string reason;
  int shift = 0;  // box side is 2 pi 2^shift
  double L = 1;
  std::vector<AtomSpec> atoms;
  Grid grid() const { return Grid(L, N); }
  int N = 0;
};

/// Largest |xi_i| of the atoms' Fourier support.
inline double frequency_extent(const InflationConfig& cfg, int kmax) {
  const double w = std::ldexp(2 * cfg.theta_a, kmax);
  const double om = 17.0 / 12.0 * std::ldexp(1.0, cfg.n);
  return std::max(om * std::sqrt(0.5) + w * cfg.epsilon, w * (17.0 / 24.0 / (2 * cfg.theta_a) + 1.0));
}

/// Box scale, atom placement and feasibility for one n. Atoms sit on the box diagonal, equally spaced.
inline DeskLayout desk_layout(const InflationConfig& cfg) {
  cfg.validate();
  DeskLayout d;
  d.N = cfg.N;
  const auto ks = block_set(cfg);
  if (ks.empty()) {
    d.reason = "empty block set";
    return d;
  }
  const int kmax = ks.back(), kmin = ks.front();
  const int m = int(ks.size());
  const double fmax = frequency_extent(cfg, kmax);
  const double band = Grid(1.0, cfg.N).dealias_band();
  const double width = 1.0 / (std::ldexp(cfg.epsilon, kmin) * cfg.theta_a);
  // smallest box holding the atoms min_separation widths apart along the diagonal
  const int sep_shift =
      int(std::ceil(std::log2(cfg.min_separation * width * m / (std::sqrt(3.0) * 2 * M_PI)) - 1e-12));
  d.shift = cfg.recenter_shift ? *cfg.recenter_shift : int(std::floor(std::log2(band / fmax)));
  d.L = std::ldexp(1.0, d.shift);
  const double need_N = 3 * fmax * std::ldexp(1.0, std::max(sep_shift, cfg.recenter_shift.value_or(sep_shift)));
  if (fmax * d.L > band || d.shift < sep_shift) {
    std::ostringstream os;
    os << "frequency overflow: carrier " << fmax << " with " << m << " atoms of envelope width " << width
       << " needs N >= " << std::ceil(need_N);
    d.reason = os.str();
    return d;
  }
  const double amp0 = std::pow(double(cfg.n), -1.0 / (2 * cfg.r()));
  for (int i = 0; i < m; ++i) {
    AtomSpec a;
    a.k = ks[i];
    const double c = 2 * M_PI * d.L * (i + 0.5) / m;
    a.center = {c, c, c};
    a.carrier = 17.0 / 12.0 * std::ldexp(1.0, cfg.n);
    a.A_diag = {cfg.epsilon, cfg.epsilon, 1.0};
    a.amplitude = amp0 * std::ldexp(1.0, a.k);
    d.atoms.push_back(a);
  }
  d.feasible = true;
  return d;
}

namespace detail {

inline void require_feasible(const DeskLayout& d) {
  if (!d.feasible) throw ConfigError("infeasible inflation layout: " + d.reason);
}

// Adds the Fourier coefficients of amp * phi_bump(M(x - c)) sin(omega e.x), evaluated exactly on the lattice.
inline void add_atom(SpectralField& f, const AtomSpec& a, const ThetaProfile& prof) {
  const Grid& g = f.grid;
  const double L = g.L;
  const auto& e = carrier_direction();
  const double Md[3] = {std::ldexp(a.A_diag[0], a.k), std::ldexp(a.A_diag[1], a.k), std::ldexp(a.A_diag[2], a.k)};
  const double det = Md[0] * Md[1] * Md[2];
  const double vol = std::pow(2 * M_PI * L, 3);
  const double half[3] = {Md[0] * 2 * prof.a, Md[1] * 2 * prof.a, Md[2] * (17.0 / 24.0 + 2 * prof.a)};
  const int K = g.N / 2 - 1;
  for (int sgn : {+1, -1}) {
    int lo[3], hi[3];
    for (int i = 0; i < 3; ++i) {
      const double c = sgn * a.carrier * e[i];
      lo[i] = std::max(-K, int(std::ceil((c - half[i]) * L)));
      hi[i] = std::min(K, int(std::floor((c + half[i]) * L)));
    }
    for (int k0 = lo[0]; k0 <= hi[0]; ++k0)
      for (int k1 = lo[1]; k1 <= hi[1]; ++k1)
        for (int k2 = lo[2]; k2 <= hi[2]; ++k2) {
          const double xi[3] = {k0 / L, k1 / L, k2 / L};
          const double eta[3] = {(xi[0] - sgn * a.carrier * e[0]) / Md[0], (xi[1] - sgn * a.carrier * e[1]) / Md[1],
                                 (xi[2] - sgn * a.carrier * e[2]) / Md[2]};
          const cplx ph = prof.phi_hat(eta[0], eta[1], eta[2]);
          if (ph == cplx(0, 0)) continue;
          const double cx = a.center[0] * xi[0] + a.center[1] * xi[1] + a.center[2] * xi[2];
          const cplx F = std::polar(1.0, -cx) * ph / det;
          f.mode(k0, k1, k2) += double(sgn) * a.amplitude * F / (cplx(0, 2) * vol);
        }
  }
}

}  // namespace detail

inline SpectralField synthesize_bn(const InflationConfig& cfg, const DeskLayout& d) {
  detail::require_feasible(d);
  SpectralField b(d.grid(), true);
  const ThetaProfile prof{cfg.theta_a};
  for (const auto& a : d.atoms) detail::add_atom(b, a, prof);
  return b;
}

/// c_n = F^{-1}[(xi2 - xi1)/xi2 b-hat]; xi2 = 0 inside the support violates the construction.
inline SpectralField synthesize_cn(const SpectralField& b) {
  SpectralField c(b.grid, true);
  for_each_mode(b.grid, [&](std::size_t i, int k0, int k1, int) {
    if (b.c[i] == cplx(0, 0)) return;
    if (k1 == 0)
      throw DomainError("xi2 = 0 inside the support of b_n at k = (" + std::to_string(k0) + ", 0, ...)");
    c.c[i] = double(k1 - k0) / double(k1) * b.c[i];
  });
  return c;
}

inline SpectralVectorField synthesize_gn(const SpectralField& b, const SpectralField& c) {
  return {b, c - b, SpectralField(b.grid, true)};
}

inline SpectralVectorField synthesize_gn(const InflationConfig& cfg, const DeskLayout& d) {
  const SpectralField b = synthesize_bn(cfg, d);
  return synthesize_gn(b, synthesize_cn(b));
}

/// (sum_{j in set} ||Delta_j u||_3^q)^{1/q}.
inline double seminorm_block(const DyadicPartition& part, const SpectralVectorField& u, const std::vector<int>& set,
                             double q) {
  if (set.empty()) throw ConfigError("empty block set");
  if (!(q >= 1)) throw ConfigError("seminorm needs q >= 1");
  for (int j : set)
    if (j < part.j_min || j > part.j_max)
      throw ConfigError("block " + std::to_string(j) + " outside the partition range");
  double s = 0;
  for (int j : set) s += std::pow(lp_norm(delta_j(part, u, j), 3.0), q);
  return std::pow(s, 1.0 / q);
}
inline double seminorm_block(const DyadicPartition& part, const SpectralField& u, const std::vector<int>& set,
                             double q) {
  return seminorm_block(part, SpectralVectorField(u, SpectralField(u.grid), SpectralField(u.grid)), set, q);
}

inline SpectralVectorField compute_Gn(const SpectralVectorField& g, double mu) { return ns_bilinear(g, g, mu); }

/// Fraction of the L2 mass of u in block j.
inline double block_mass_fraction(const DyadicPartition& part, const SpectralVectorField& u, int j) {
  const double tot = coeff_energy(u);
  return tot > 0 ? coeff_energy(delta_j(part, u, j)) / tot : 0.0;
}

struct AtomNorms {
  double p = 0;
  std::vector<double> per_atom;
  double aggregate = 0;
  double overlap_bound = 0;        // largest fraction of an atom's L^p mass outside its own cell
  double multiplier_sup = 0;       // sup |(xi2 - xi1)/xi2| over the support box
  double cn_bound = 0;             // multiplier_sup * aggregate
};

struct AggregationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// ||b_n||_p from per-atom tensor quadrature of the theta profiles, the carrier replaced by its
/// |sin|^p mean, atoms summed as disjoint.
inline AtomNorms semianalytic_atom_norms(const InflationConfig& cfg, const DeskLayout& d, double p,
                                         bool enforce_overlap = true) {
  detail::require_feasible(d);
  if (!(p >= 1 && p <= 3)) throw ConfigError("semianalytic norms need p in [1, 3]");
  AtomNorms out;
  out.p = p;
  const ThetaIntegrals full = theta_integrals(cfg.theta_a, p);
  const double Mp = mean_abs_sin_pow(p);
  const int m = int(d.atoms.size());
  const double h = M_PI * d.L / m;  // half cell along each axis
  double sum = 0;
  for (const auto& a : d.atoms) {
    const double s12 = std::ldexp(cfg.epsilon, a.k), s3 = std::ldexp(1.0, a.k);
    const double det = s12 * s12 * s3;
    const double np = std::pow(a.amplitude, p) * Mp * full.I1 * full.I1 * full.I3 / det;
    out.per_atom.push_back(std::pow(np, 1.0 / p));
    sum += np;
    const double t12 = theta_integrals(cfg.theta_a, p, s12 * h).I1 / full.I1;
    const double t3 = theta_integrals(cfg.theta_a, p, s3 * h).I3 / full.I3;
    out.overlap_bound = std::max(out.overlap_bound, 1.0 - (1.0 - t12) * (1.0 - t12) * (1.0 - t3));
    const double w = std::ldexp(2 * cfg.theta_a * cfg.epsilon, a.k);
    const double lo = a.carrier * std::sqrt(0.5) - w;
    if (!(lo > 0)) throw DomainError("support of b_n reaches xi2 = 0");
    out.multiplier_sup = std::max(out.multiplier_sup, 2 * w / lo);
  }
  out.aggregate = std::pow(sum, 1.0 / p);
  out.cn_bound = out.multiplier_sup * out.aggregate;
  if (enforce_overlap && out.overlap_bound > cfg.max_overlap)
    throw AggregationError("atoms overlap beyond tolerance: " + std::to_string(out.overlap_bound) + " > " +
                           std::to_string(cfg.max_overlap));
  return out;
}

/// L^p norm from samples on the 3/2-padded grid; |f|^p is not band-limited, so the N grid under-resolves it
/// when the carrier sits near the band edge.
inline double lp_norm_oversampled(const SpectralField& f, double p) {
  if (!f.real) throw ConfigError("oversampled norm needs a real field");
  SpectralField padded = f;
  padded.grid.rule = DealiasRule::zero_pad_3halves;
  bool alias = false;
  rvec s = dealias::physical(padded, alias);
  for (auto& x : s) x = std::abs(x);
  const int M = padded.grid.padded_N();
  return lp_from_abs_samples(s, p, std::pow(2 * M_PI * f.grid.L / M, 3));
}

struct LpComparison {
  double p = 0, grid = NAN, semianalytic = NAN, overlap_bound = NAN;
  bool aggregation_valid = false;
  double rel_diff() const { return std::abs(semianalytic / grid - 1.0); }
};

struct SweepRow {
  int n = 0;
  double epsilon = 0, r = 0;
  int grid_N = 0;
  int recenter_shift = 0;
  std::string block_rule;
  bool feasible = false;
  std::string note;
  double norm_g_B031 = NAN, norm_f_Bm231 = NAN, seminorm_Gn = NAN, seminorm_Un = NAN;
  double mass_fraction = NAN, div_g = NAN, norm_G_total = NAN;
  int picard_iterates = 0;
  std::string placement;
  double theta_a = NAN;
  std::vector<LpComparison> lp_b;
};

struct SweepOptions {
  std::vector<double> lp_exponents = {1.0, 1.5, 2.0, 3.0};
  bool solve_picard = true;
  int picard_max = 30;
  double picard_tol = 1e-10;
};

/// One sweep row: synthesis, norms of g_n and f_n = -mu Lap g_n, G_n seminorm, optional U_n remainder.
inline SweepRow inflation_row(const InflationConfig& cfg, const SweepOptions& opt = {}) {
  SweepRow row;
  row.n = cfg.n;
  row.epsilon = cfg.epsilon;
  row.r = cfg.r();
  row.grid_N = cfg.N;
  row.block_rule = to_string(cfg.block_rule);
  row.theta_a = cfg.theta_a;
  row.placement = "diagonal";
  const DeskLayout d = desk_layout(cfg);
  row.recenter_shift = d.shift;
  if (!d.feasible) {
    row.note = d.reason;
    return row;
  }
  const Grid g = d.grid();
  const DyadicPartition part = build_partition(g);
  const auto ks = block_set(cfg);
  if (cfg.n > part.interior_max() || ks.front() < part.j_min) {
    row.note = "designated blocks outside the partition range";
    return row;
  }
  SpectralVectorField gn;
  {
    SpectralField b = synthesize_bn(cfg, d);
    for (double p : opt.lp_exponents) {
      const AtomNorms an = semianalytic_atom_norms(cfg, d, p, false);
      LpComparison cmp;
      cmp.p = p;
      cmp.grid = lp_norm_oversampled(b, p);
      cmp.semianalytic = an.aggregate;
      cmp.overlap_bound = an.overlap_bound;
      cmp.aggregation_valid = an.overlap_bound <= cfg.max_overlap;
      row.lp_b.push_back(cmp);
    }
    SpectralField c = synthesize_cn(b);
    gn = synthesize_gn(b, c);
  }
  row.feasible = true;
  row.div_g = relative_divergence(gn);
  row.mass_fraction = block_mass_fraction(part, gn, cfg.n);
  const auto gb = block_norms(part, gn, {3.0})[0];
  row.norm_g_B031 = besov_from_blocks(part, gb, 0.0, 1.0);
  {
    const auto fb = block_norms(part, (-cfg.mu) * laplacian(gn), {3.0})[0];
    row.norm_f_Bm231 = besov_from_blocks(part, fb, -2.0, 1.0);
  }
  {
    const SpectralVectorField G = compute_Gn(gn, cfg.mu);
    row.seminorm_Gn = seminorm_block(part, G, ks, cfg.r());
    row.norm_G_total = besov_norm(part, G, {0.0, 3.0, cfg.r()});
  }
  if (opt.solve_picard) {
    // u = g_n + N(u, u): the first iterate is g_n since P g_n = g_n
    SpectralVectorField u = gn;
    bool ok = false;
    double prev = inf;
    int grow = 0;
    for (int it = 0; it < opt.picard_max; ++it) {
      SpectralVectorField next = ns_bilinear(u, u, cfg.mu);
      add_to(next, gn);
      const double nn = l2_norm(next);
      add_to(u, next, -1.0);
      const double res = nn > 0 ? l2_norm(u) / nn : 0.0;
      u = std::move(next);
      row.picard_iterates = it + 1;
      grow = res > prev ? grow + 1 : 0;
      prev = res;
      if (!std::isfinite(res) || grow >= 3) break;
      if (res <= opt.picard_tol) {
        ok = true;
        break;
      }
    }
    if (ok) {
      add_to(u, gn, -1.0);
      add_to(u, compute_Gn(gn, cfg.mu), -1.0);
      row.seminorm_Un = seminorm_block(part, u, ks, cfg.r());
    } else {
      row.note += (row.note.empty() ? "" : "; ") + std::string("Picard iteration for u_n did not converge");
    }
  }
  return row;
}

inline std::vector<SweepRow> inflation_sweep(const InflationConfig& base, const std::vector<int>& ns,
                                             const SweepOptions& opt = {}) {
  std::vector<SweepRow> rows;
  for (int n : ns) {
    InflationConfig c = base;
    c.n = n;
    rows.push_back(inflation_row(c, opt));
  }
  return rows;
}

}  // namespace hmhd
