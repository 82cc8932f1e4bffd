#pragma once

#include <array>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "state.hpp"

namespace hmhd {

/// F -> ((-mu Lap)^{-1} P f, (-nu Lap)^{-1} P g, (-nu Lap)^{-1} P curl_g_data).
inline HallState linear_solve(const ForceTriple& F, const PhysicalParams& prm) {
  prm.validate();
  return {(-1.0 / prm.mu) * inverse_laplacian(leray_project(F.f)),
          (-1.0 / prm.nu) * inverse_laplacian(leray_project(F.g)),
          (-1.0 / prm.nu) * inverse_laplacian(leray_project(F.curl_g_data))};
}

namespace detail {

// Physical samples of the four fields entering the products: u, B, w = u - hJ, c = curl^{-1} J.
struct PhysicalCache {
  std::array<rvec, 3> u, B, w, c;
};

inline PhysicalCache physical_cache(const HallState& U, const PhysicalParams& prm, bool& alias) {
  PhysicalCache P;
  P.u = dealias::physical(U.u, alias);
  P.B = dealias::physical(U.B, alias);
  const auto pJ = dealias::physical(U.J, alias);
  for (int a = 0; a < 3; ++a) {
    P.w[a] = P.u[a];
    for (std::size_t i = 0; i < P.w[a].size(); ++i) P.w[a][i] -= prm.hall * pJ[a][i];
  }
  P.c = dealias::physical(biot_savart(U.J), alias);
  return P;
}

// Pointwise sums of the quadratic terms: T = -u (x) u' + B (x) B', X = w x B', Y = w x c'.
struct ProductAccumulator {
  std::array<rvec, 9> T;
  std::array<rvec, 3> X, Y;

  explicit ProductAccumulator(std::size_t n) {
    for (auto& t : T) t.assign(n, 0.0);
    for (auto& x : X) x.assign(n, 0.0);
    for (auto& y : Y) y.assign(n, 0.0);
  }

  void add(const PhysicalCache& P, const PhysicalCache& Q) {
    const std::size_t n = T[0].size();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double* t = T[3 * a + b].data();
        const double *pu = P.u[a].data(), *qu = Q.u[b].data(), *pB = P.B[a].data(), *qB = Q.B[b].data();
        for (std::size_t i = 0; i < n; ++i) t[i] += pB[i] * qB[i] - pu[i] * qu[i];
      }
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      double *x = X[a].data(), *y = Y[a].data();
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += P.w[b][i] * Q.B[c][i] - P.w[c][i] * Q.B[b][i];
        y[i] += P.w[b][i] * Q.c[c][i] - P.w[c][i] * Q.c[b][i];
      }
    }
  }
};

// (N1, N2, N3) from accumulated products, computed on half spectra.
inline HallState finish_products(const ProductAccumulator& acc, const Grid& g, const PhysicalParams& prm,
                                 bool alias) {
  const std::size_t nh = fft::half_count(g.N);
  std::array<cvec, 3> n1, n2, n3;
  for (int a = 0; a < 3; ++a) {
    n1[a].assign(nh, cplx(0, 0));
    n2[a].assign(nh, cplx(0, 0));
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const cvec h = dealias::spectral_half(acc.T[3 * a + b], g);
      dealias::for_each_half_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        const int k[3] = {k0, k1, k2};
        n1[a][i] += ik(g, k[b]) * h[i];
      });
    }
  std::array<cvec, 3> X, Y;
  for (int a = 0; a < 3; ++a) {
    X[a] = dealias::spectral_half(acc.X[a], g);
    n3[a] = dealias::spectral_half(acc.Y[a], g);
  }
  dealias::for_each_half_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    const double x[3] = {double(k0), double(k1), double(k2)};
    const double n2k = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if (n2k == 0.0) {
      for (int a = 0; a < 3; ++a) n1[a][i] = n2[a][i] = n3[a][i] = 0.0;
      return;
    }
    const double xi2v = xi2(g, k0, k1, k2);
    const cplx d[3] = {ik(g, k0), ik(g, k1), ik(g, k2)};
    const cplx dot1 = (x[0] * n1[0][i] + x[1] * n1[1][i] + x[2] * n1[2][i]) / n2k;
    const cplx dot3 = (x[0] * n3[0][i] + x[1] * n3[1][i] + x[2] * n3[2][i]) / n2k;
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      n2[a][i] = (d[b] * X[c][i] - d[c] * X[b][i]) / (prm.nu * xi2v);
    }
    for (int a = 0; a < 3; ++a) {
      n1[a][i] = (n1[a][i] - x[a] * dot1) / (prm.mu * xi2v);
      n3[a][i] = (n3[a][i] - x[a] * dot3) / prm.nu;
    }
  });
  HallState out;
  for (int a = 0; a < 3; ++a) {
    out.u[a] = fft::expand(n1[a], g);
    out.B[a] = fft::expand(n2[a], g);
    out.J[a] = fft::expand(n3[a], g);
    out.u[a].aliasing = out.B[a].aliasing = out.J[a].aliasing = alias;
  }
  return out;
}

}  // namespace detail

/// N(U, V) with N1 = (-mu Lap)^{-1} P div(-u (x) u' + B (x) B'), N2 = (-nu Lap)^{-1} curl(w x B'),
/// N3 = (-nu Lap)^{-1} curl curl(w x curl^{-1} J') = nu^{-1} P(w x curl^{-1} J'), w = u - hJ.
inline HallState nonlinear_N(const HallState& U, const HallState& V, const PhysicalParams& prm) {
  prm.validate();
  require_same_grid(U.grid(), V.grid());
  if (!U.u.real() || !V.u.real()) throw ConfigError("Hall-MHD states must be real fields");
  bool alias = false;
  const auto P = detail::physical_cache(U, prm, alias);
  detail::ProductAccumulator acc(P.u[0].size());
  if (&U == &V) {
    acc.add(P, P);
  } else {
    const auto Q = detail::physical_cache(V, prm, alias);
    acc.add(P, Q);
  }
  return detail::finish_products(acc, U.grid(), prm, alias);
}

/// N3 composed literally: curl, curl, then (-nu Lap)^{-1}.
inline SpectralVectorField nonlinear_N3_reference(const HallState& U, const HallState& V, const PhysicalParams& prm) {
  const SpectralVectorField w = U.u - prm.hall * U.J;
  const SpectralVectorField c = biot_savart(V.J);
  return (-1.0 / prm.nu) * inverse_laplacian(curl(curl(cross_product(w, c))));
}

enum class SolveMode { series, fixed_point };

inline const char* to_string(SolveMode m) { return m == SolveMode::series ? "series" : "fixed_point"; }
inline SolveMode parse_mode(const std::string& s) {
  if (s == "series") return SolveMode::series;
  if (s == "fixed_point") return SolveMode::fixed_point;
  throw ConfigError("unknown solver mode '" + s + "'");
}

inline std::vector<BesovIndex> default_report_indices() {
  return {{3 / 1.5 - 1, 1.5, 1}, {3 / 1.5 - 1, 1.5, 2}, {0.5, 2, 1}, {0.5, 2, 2}, {0.5, 2, inf}};
}

struct SolveOptions {
  SolveMode mode = SolveMode::fixed_point;
  int max_m = 50;
  double tol = 1e-12;
  std::vector<BesovIndex> report_indices = default_report_indices();
};

namespace detail {

inline void finalize_report(SolveReport& rep, const DyadicPartition& part, const HallState& U,
                            const SolveOptions& opt) {
  for (const auto& idx : opt.report_indices)
    rep.final_norms.push_back(
        {idx, besov_norm(part, U.u, idx), besov_norm(part, U.B, idx), besov_norm(part, U.J, idx)});
  const double nJ = l2_norm(U.J);
  rep.consistency = nJ > 0 ? l2_norm(U.J - curl(U.B)) / nJ : l2_norm(curl(U.B));
  for (int i = 0; i < 3; ++i) rep.max_divergence = std::max(rep.max_divergence, relative_divergence(U[i]));
  rep.aliasing = rep.aliasing || U.aliasing();
  if (rep.aliasing) rep.warnings.push_back("aliasing: a product input exceeded the dealias band");
  for (std::size_t i = 1; i < rep.residuals.size(); ++i)
    if (rep.residuals[i] > rep.residuals[i - 1]) rep.residual_monotone = false;
}

inline bool growing(const std::vector<double>& s, int run) {
  if (int(s.size()) < run + 1) return false;
  for (int i = 0; i < run; ++i)
    if (!(s[s.size() - 1 - i] > s[s.size() - 2 - i])) return false;
  return true;
}

}  // namespace detail

/// Solves U = L F + N(U, U) either by summing the series A_m or by fixed-point iteration.
inline std::pair<HallState, SolveReport> picard_solve(const ForceTriple& F, const PhysicalParams& prm,
                                                      const SolveOptions& opt) {
  prm.validate();
  if (opt.max_m < 1) throw ConfigError("max_m must be >= 1");
  const Grid& g = F.grid();
  const DyadicPartition part = build_partition(g);
  SolveReport rep;
  rep.mode = to_string(opt.mode);
  const HallState A1 = linear_solve(F, prm);
  const double n1 = s_norm(part, A1);

  if (opt.mode == SolveMode::series) {
    std::vector<detail::PhysicalCache> caches;
    bool alias = false;
    HallState sum = A1;
    rep.series_norms.push_back(n1);
    rep.iterates = 1;
    if (n1 == 0.0) {
      rep.converged = true;
    } else {
      caches.push_back(detail::physical_cache(A1, prm, alias));
      for (int m = 2; m <= opt.max_m; ++m) {
        detail::ProductAccumulator acc(caches[0].u[0].size());
        for (int k = 1; k < m; ++k) acc.add(caches[k - 1], caches[m - k - 1]);
        const HallState Am = detail::finish_products(acc, g, prm, alias);
        const double nm = s_norm(part, Am);
        rep.series_norms.push_back(nm);
        rep.iterates = m;
        add_to(sum, Am);
        if (!std::isfinite(nm) || detail::growing(rep.series_norms, 3)) {
          rep.aliasing = alias;
          throw NonConvergence("Picard series diverges: ||A_m|| grew for 3 consecutive m", rep);
        }
        if (nm <= opt.tol * n1) {
          rep.converged = true;
          break;
        }
        if (m < opt.max_m) caches.push_back(detail::physical_cache(Am, prm, alias));
      }
    }
    rep.aliasing = alias;
    detail::finalize_report(rep, part, sum, opt);
    return {std::move(sum), std::move(rep)};
  }

  HallState U = A1;
  rep.iterates = 0;
  if (n1 == 0.0) {
    rep.converged = true;
    rep.iterates = 1;
    rep.residuals.push_back(0.0);
  }
  while (!rep.converged && rep.iterates < opt.max_m) {
    HallState next = A1 + nonlinear_N(U, U, prm);
    const double nn = s_norm(part, next);
    const double res = nn > 0 ? s_norm(part, next - U) / nn : 0.0;
    U = std::move(next);
    ++rep.iterates;
    rep.residuals.push_back(res);
    if (!std::isfinite(res) || detail::growing(rep.residuals, 3))
      throw NonConvergence("fixed-point iteration diverges: residual grew for 3 consecutive steps", rep);
    if (res <= opt.tol) rep.converged = true;
  }
  detail::finalize_report(rep, part, U, opt);
  return {std::move(U), std::move(rep)};
}

struct SeriesShape {
  double slope = 0;         // least-squares slope of log ||A_m|| against m
  double fit_residual = 0;  // largest deviation from the fitted line
  double max_second_difference = 0;
  bool concave = false;
  bool near_linear = false;
  bool pass = false;
};

/// Shape of log ||A_m||: concave, or linear within rel_tol * |slope| * (M - 1).
inline SeriesShape series_shape(const std::vector<double>& norms, double rel_tol = 0.05) {
  SeriesShape sh;
  const int M = int(norms.size());
  if (M < 3) throw ConfigError("series shape needs at least three terms");
  std::vector<double> y(M);
  for (int i = 0; i < M; ++i) {
    if (!(norms[i] > 0)) throw ConfigError("series shape needs positive norms");
    y[i] = std::log(norms[i]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < M; ++i) {
    sx += i + 1;
    sy += y[i];
    sxx += double(i + 1) * (i + 1);
    sxy += (i + 1) * y[i];
  }
  sh.slope = (M * sxy - sx * sy) / (M * sxx - sx * sx);
  const double icpt = (sy - sh.slope * sx) / M;
  for (int i = 0; i < M; ++i) sh.fit_residual = std::max(sh.fit_residual, std::abs(y[i] - icpt - sh.slope * (i + 1)));
  sh.max_second_difference = -inf;
  for (int i = 1; i + 1 < M; ++i) sh.max_second_difference = std::max(sh.max_second_difference, y[i + 1] - 2 * y[i] + y[i - 1]);
  sh.concave = sh.max_second_difference <= 1e-12 * (1 + std::abs(y[0]));
  sh.near_linear = sh.fit_residual <= rel_tol * std::abs(sh.slope) * (M - 1);
  sh.pass = sh.concave || sh.near_linear;
  return sh;
}

struct ResidualReport {
  std::array<double, 3> solved{};          // ||U - LF - N(U,U)||_2 per component
  std::array<double, 3> solved_relative{}; // divided by ||U||_2 per component
  double momentum = 0, momentum_relative = 0;
  double induction = 0, induction_relative = 0;
  double divergence_u = 0, divergence_B = 0;
};

namespace detail {
inline double rel(double a, double scale) { return scale > 0 ? a / scale : a; }
}  // namespace detail

/// Solved-form and original-form residuals; the pressure is recovered as -(-Lap)^{-1} div X,
/// X = f - u.grad u + (curl B) x B.
inline ResidualReport residual(const HallState& U, const ForceTriple& F, const PhysicalParams& prm) {
  require_same_grid(U.grid(), F.grid());
  ResidualReport r;
  const HallState d = U - linear_solve(F, prm) - nonlinear_N(U, U, prm);
  for (int i = 0; i < 3; ++i) {
    r.solved[i] = l2_norm(d[i]);
    r.solved_relative[i] = detail::rel(r.solved[i], l2_norm(U[i]));
  }
  const auto J = curl(U.B);
  const auto ugu = advect(U.u, U.u);
  const auto JxB = cross_product(J, U.B);
  const auto X = F.f - ugu + JxB;
  const auto p = inverse_laplacian(divergence(X));
  const auto visc = (-prm.mu) * laplacian(U.u);
  auto mom = ugu + gradient(p) + visc - JxB - F.f;
  for (int a = 0; a < 3; ++a) mom[a].c[0] = 0.0;
  r.momentum = l2_norm(mom);
  r.momentum_relative = detail::rel(r.momentum, l2_norm(visc) + l2_norm(F.f));
  const auto mag = (-prm.nu) * laplacian(U.B);
  auto ind = mag - curl(cross_product(U.u - prm.hall * J, U.B)) - F.g;
  r.induction = l2_norm(ind);
  r.induction_relative = detail::rel(r.induction, l2_norm(mag) + l2_norm(F.g));
  r.divergence_u = relative_divergence(U.u);
  r.divergence_B = relative_divergence(U.B);
  return r;
}

struct CancellationPairings {
  double curl_pairing = 0;  // (curl((curl B) x B), B) / norms
  double cross_pairing = 0; // ((curl B) x B, curl B) / norms
  double v_pairing = 0;     // (curl((curl v) x B), v) / norms, when v given
};

namespace detail {
inline double normalized_pairing(const SpectralVectorField& a, const SpectralVectorField& b) {
  const double den = l2_norm(a) * l2_norm(b);
  return den > 0 ? std::abs(l2_inner(a, b)) / den : 0.0;
}
}  // namespace detail

inline CancellationPairings cancellation_check(const SpectralVectorField& B) {
  CancellationPairings c;
  const auto J = curl(B);
  const auto JxB = cross_product(J, B);
  c.curl_pairing = detail::normalized_pairing(curl(JxB), B);
  c.cross_pairing = detail::normalized_pairing(JxB, J);
  return c;
}

inline CancellationPairings cancellation_check(const SpectralVectorField& v, const SpectralVectorField& B) {
  CancellationPairings c = cancellation_check(B);
  c.v_pairing = detail::normalized_pairing(curl(cross_product(curl(v), B)), v);
  return c;
}

struct VFieldReport {
  double residual = 0;           // L2 norm of the third line of the v-system
  double relative = 0;           // divided by the sum of the term norms
  double viscosity_gap_term = 0; // ||(mu - nu) Lap u||_2
};

/// Third line of the v-system with v = u - h curl B, evaluated term by term.
inline VFieldReport v_field_diagnostics(const HallState& U, const ForceTriple& F, const PhysicalParams& prm) {
  prm.validate();
  const double h = prm.hall;
  const auto& u = U.u;
  const auto& B = U.B;
  const SpectralVectorField v = u - h * curl(B);
  const auto BgB = advect(B, B);
  const auto ugu = advect(u, u);
  const auto p = inverse_laplacian(divergence(F.f - ugu + BgB));

  std::vector<SpectralVectorField> terms;
  terms.push_back(BgB);
  terms.push_back((-1.0) * ugu);
  terms.push_back((-h) * curl(cross_product(curl(v), B)));
  terms.push_back(F.f);
  terms.push_back((-h) * F.curl_g_data);
  terms.push_back(curl(cross_product(v, u)));
  terms.push_back(2.0 * curl(advect(v, biot_savart(u - v))));
  terms.push_back((-1.0) * gradient(p));
  const auto gap = (prm.mu - prm.nu) * laplacian(u);
  terms.push_back(gap);

  SpectralVectorField lhs = (-prm.nu) * laplacian(v);
  double scale = l2_norm(lhs);
  SpectralVectorField r = lhs;
  for (const auto& t : terms) {
    add_to(r, t, -1.0);
    scale += l2_norm(t);
  }
  for (int a = 0; a < 3; ++a) r[a].c[0] = 0.0;
  VFieldReport rep;
  rep.residual = l2_norm(r);
  rep.relative = detail::rel(rep.residual, scale);
  rep.viscosity_gap_term = l2_norm(gap);
  return rep;
}

struct Manufactured {
  HallState exact;
  ForceTriple F;
};

/// Smooth divergence-free (u*, B*) of the given S-norm-free amplitude, J* = curl B*, and the forces
/// obtained by evaluating the solved form left to right.
inline Manufactured manufactured_solution(const Grid& g, const PhysicalParams& prm, std::uint64_t seed,
                                          double amplitude, int band, double beta = 1.5) {
  prm.validate();
  if (band > dealias::input_band(g)) throw ConfigError("manufactured band exceeds the dealias band");
  std::mt19937_64 rng(seed);
  Manufactured m;
  const auto u = amplitude * random_vector_field(g, rng, beta, band, true);
  const auto B = amplitude * random_vector_field(g, rng, beta, band, true);
  const auto J = curl(B);
  m.exact = {u, B, J};
  const auto f = (-prm.mu) * laplacian(u) + leray_project(tensor_divergence(tensor_product(u, u))) -
                 leray_project(tensor_divergence(tensor_product(B, B)));
  const auto gg = (-prm.nu) * laplacian(B) - curl(cross_product(u - prm.hall * J, B));
  m.F = make_forces(f, gg);
  return m;
}

}  // namespace hmhd
