#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "solver.hpp"

namespace hmhd {

/// Element (u, B) of the pair space L^2 x L^2.
struct FieldPair {
  SpectralVectorField u, B;
};

inline FieldPair operator+(const FieldPair& a, const FieldPair& b) { return {a.u + b.u, a.B + b.B}; }
inline FieldPair operator-(const FieldPair& a, const FieldPair& b) { return {a.u - b.u, a.B - b.B}; }
inline FieldPair operator*(double s, const FieldPair& a) { return {s * a.u, s * a.B}; }
inline double l2_norm(const FieldPair& x) {
  const double a = l2_norm(x.u), b = l2_norm(x.B);
  return std::sqrt(a * a + b * b);
}

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncated bilinear map: E_n acts on every input and on the outputs.
inline FieldPair friedrichs_bilinear(const FieldPair& x, const FieldPair& y, const PhysicalParams& prm, double n) {
  const auto Ebx = spectral_cutoff(x.B, n), Eby = spectral_cutoff(y.B, n);
  const auto Eux = spectral_cutoff(x.u, n), Euy = spectral_cutoff(y.u, n);
  const auto m = advect(Ebx, Eby) - advect(Eux, Euy);
  const auto u = (-1.0 / prm.mu) * inverse_laplacian(spectral_cutoff(leray_project(m), n));
  const auto e = spectral_cutoff(cross_product(Eux - prm.hall * curl(Ebx), Eby), n);
  const auto B = (-1.0 / prm.nu) * inverse_laplacian(curl(e));
  return {u, B};
}

/// Lower estimate of the bilinear norm K: iterate x <- B(x,x)/||B(x,x)|| from random unit starts
/// in the cutoff band and keep the best ||B(x,x)|| / ||x||^2.
inline double estimate_bilinear_norm(const Grid& g, const PhysicalParams& prm, double n, int starts = 3,
                                     int iters = 6, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  double K = 0.0;
  for (int s = 0; s < starts; ++s) {
    FieldPair x{spectral_cutoff(random_vector_field(g, rng, 0.0, default_band(g), true), n),
                spectral_cutoff(random_vector_field(g, rng, 0.0, default_band(g), true), n)};
    double nx = l2_norm(x);
    if (nx == 0) continue;
    x = (1.0 / nx) * x;
    for (int it = 0; it < iters; ++it) {
      FieldPair y = friedrichs_bilinear(x, x, prm, n);
      const double ny = l2_norm(y);
      if (!(ny > 0)) break;
      K = std::max(K, ny);
      x = (1.0 / ny) * y;
    }
  }
  return K;
}

struct FriedrichsOptions {
  double tol = 1e-12;
  int max_iter = 200;
  std::optional<double> delta;       // smallness threshold on the data norm, checked with a warning
  double delta_r = 2.0;              // summation index of the data norm compared with delta
  std::vector<double> bound_r = {1.0, 2.0, inf};
  int power_starts = 3;
  int power_iters = 6;
};

struct FriedrichsReport {
  SolveReport solve;
  double cutoff = 0;
  double K_lower = 0;
  double a_norm = 0;
  double contraction = 0;  // 4 K ||a||
  double data_norm = 0;
  std::vector<std::pair<double, double>> uniform_bound;  // (r, ||(u,B,v)||_{B^{1/2}_{2,r}})
  double cutoff_defect = 0;                              // ||E_n u - u|| + ||E_n B - B||, relative
};

/// Solves x = a + B(x, x) for the E_n-truncated system in L^2 x L^2.
inline std::pair<FieldPair, FriedrichsReport> friedrichs_solve(const SpectralVectorField& f,
                                                               const SpectralVectorField& g,
                                                               const PhysicalParams& prm, double n,
                                                               const FriedrichsOptions& opt = {}) {
  prm.validate();
  require_same_grid(f.grid(), g.grid());
  const Grid& grid = f.grid();
  const DyadicPartition part = build_partition(grid);
  FriedrichsReport rep;
  rep.cutoff = n;
  rep.solve.mode = "friedrichs";
  rep.data_norm = data_norm(part, make_forces(f, g), opt.delta_r);
  if (opt.delta && !(rep.data_norm < *opt.delta))
    rep.solve.warnings.push_back("data norm " + std::to_string(rep.data_norm) + " is not below delta " +
                                 std::to_string(*opt.delta));

  const FieldPair a{(-1.0 / prm.mu) * inverse_laplacian(spectral_cutoff(leray_project(f), n)),
                    (-1.0 / prm.nu) * inverse_laplacian(spectral_cutoff(leray_project(g), n))};
  rep.a_norm = l2_norm(a);
  rep.K_lower = estimate_bilinear_norm(grid, prm, n, opt.power_starts, opt.power_iters);
  rep.contraction = 4.0 * rep.K_lower * rep.a_norm;
  if (!(rep.contraction < 1.0))
    throw PreconditionError("contraction precondition fails: 4 K ||a|| = " + std::to_string(rep.contraction) +
                            " (K lower estimate " + std::to_string(rep.K_lower) + ")");

  FieldPair x = a;
  if (rep.a_norm == 0.0) {
    rep.solve.converged = true;
    rep.solve.iterates = 1;
    rep.solve.residuals.push_back(0.0);
  }
  int stalled = 0;
  while (!rep.solve.converged && rep.solve.iterates < opt.max_iter) {
    FieldPair next = a + friedrichs_bilinear(x, x, prm, n);
    const double nn = l2_norm(next);
    const double res = nn > 0 ? l2_norm(next - x) / nn : 0.0;
    x = std::move(next);
    ++rep.solve.iterates;
    auto& rs = rep.solve.residuals;
    stalled = (!rs.empty() && !(res < rs.back())) ? stalled + 1 : 0;
    rs.push_back(res);
    if (!std::isfinite(res) || stalled >= 5)
      throw NonConvergence("Friedrichs iteration stagnates", rep.solve);
    if (res <= opt.tol) rep.solve.converged = true;
  }
  if (!rep.solve.converged) throw NonConvergence("Friedrichs iteration hit max_iter", rep.solve);

  const double nx = l2_norm(x);
  rep.cutoff_defect =
      nx > 0 ? (l2_norm(spectral_cutoff(x.u, n) - x.u) + l2_norm(spectral_cutoff(x.B, n) - x.B)) / nx : 0.0;
  rep.solve.max_divergence = std::max(relative_divergence(x.u), relative_divergence(x.B));
  rep.solve.aliasing = x.u.aliasing() || x.B.aliasing();
  const SpectralVectorField v = x.u - prm.hall * curl(x.B);
  for (double r : opt.bound_r) rep.uniform_bound.push_back({r, triple_norm(part, x.u, x.B, v, {0.5, 2.0, r})});
  return {std::move(x), std::move(rep)};
}

struct DeltaCalibration {
  double threshold_amplitude = 0;       // largest amplitude observed to contract
  std::vector<std::pair<double, double>> delta;  // (r, delta_r)
  int solves = 0;
};

/// Bisection on the amplitude of a fixed data shape; contraction means the fixed-point solve converges.
inline DeltaCalibration calibrate_delta(const ForceTriple& shape, const PhysicalParams& prm,
                                        const std::vector<double>& rs = {1.0, 2.0, inf}, int steps = 10,
                                        int max_iter = 80, double tol = 1e-10) {
  const DyadicPartition part = build_partition(shape.grid());
  DeltaCalibration cal;
  auto contracts = [&](double amp) {
    ++cal.solves;
    SolveOptions o;
    o.mode = SolveMode::fixed_point;
    o.max_m = max_iter;
    o.tol = tol;
    o.report_indices = {};
    try {
      return picard_solve(amp * shape, prm, o).second.converged;
    } catch (const NonConvergence&) {
      return false;
    }
  };
  double lo = 1.0, hi = 1.0;
  if (contracts(1.0)) {
    do {
      lo = hi;
      hi *= 4.0;
    } while (contracts(hi) && hi < 1e8);
  } else {
    do {
      hi = lo;
      lo /= 4.0;
    } while (!contracts(lo) && lo > 1e-12);
  }
  for (int s = 0; s < steps; ++s) {
    const double mid = std::sqrt(lo * hi);
    (contracts(mid) ? lo : hi) = mid;
  }
  cal.threshold_amplitude = lo;
  for (double r : rs) cal.delta.push_back({r, lo * data_norm(part, shape, r)});
  return cal;
}

struct LipschitzResult {
  double r = 2.0;
  double data_distance = 0;
  double solution_distance = 0;
  double constant = 0;
};

/// Empirical Lipschitz constant of the solution map between F and F + dF at the p = 2 indices.
inline LipschitzResult lipschitz_audit(const ForceTriple& F, const ForceTriple& dF, const PhysicalParams& prm,
                                       double r, double tol = 1e-12) {
  const DyadicPartition part = build_partition(F.grid());
  SolveOptions o;
  o.tol = tol;
  o.max_m = 200;
  o.report_indices = {};
  const auto U1 = picard_solve(F, prm, o).first;
  const ForceTriple F2{F.f + dF.f, F.g + dF.g, F.curl_g_data + dF.curl_g_data, F.curl_g_derived};
  const auto U2 = picard_solve(F2, prm, o).first;
  const HallState d = U1 - U2;
  LipschitzResult L;
  L.r = r;
  L.data_distance = data_norm(part, dF, r);
  L.solution_distance = triple_norm(part, d.u, d.B, d.J, {0.5, 2.0, r});
  L.constant = L.data_distance > 0 ? L.solution_distance / L.data_distance : 0.0;
  return L;
}

}  // namespace hmhd
