#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "../lp/besov.hpp"
#include "../products.hpp"

namespace hmhd {

struct PhysicalParams {
  double mu = 1.0;
  double nu = 1.0;
  double hall = 1.0;

  void validate() const {
    if (!(mu > 0)) throw ConfigError("viscosity mu must be positive");
    if (!(nu > 0)) throw ConfigError("resistivity nu must be positive");
    if (!(hall > 0)) throw ConfigError("Hall coefficient must be positive");
  }
};

/// (u, B, J) of the extended system; J is an unknown in its own right.
struct HallState {
  SpectralVectorField u, B, J;

  HallState() = default;
  explicit HallState(const Grid& g) : u(g), B(g), J(g) {}
  HallState(SpectralVectorField u_, SpectralVectorField B_, SpectralVectorField J_)
      : u(std::move(u_)), B(std::move(B_)), J(std::move(J_)) {}

  const Grid& grid() const { return u.grid(); }
  SpectralVectorField& operator[](int i) { return i == 0 ? u : i == 1 ? B : J; }
  const SpectralVectorField& operator[](int i) const { return i == 0 ? u : i == 1 ? B : J; }
  bool aliasing() const { return u.aliasing() || B.aliasing() || J.aliasing(); }
};

inline HallState operator+(const HallState& a, const HallState& b) { return {a.u + b.u, a.B + b.B, a.J + b.J}; }
inline HallState operator-(const HallState& a, const HallState& b) { return {a.u - b.u, a.B - b.B, a.J - b.J}; }
inline HallState operator*(double s, const HallState& a) { return {s * a.u, s * a.B, s * a.J}; }
inline void add_to(HallState& acc, const HallState& x, double a = 1.0) {
  for (int i = 0; i < 3; ++i) add_to(acc[i], x[i], a);
}

/// (f, g, curl_g_data); the last is the datum h = curl g, possibly supplied independently.
struct ForceTriple {
  SpectralVectorField f, g, curl_g_data;
  bool curl_g_derived = true;

  const Grid& grid() const { return f.grid(); }
};

inline ForceTriple make_forces(const SpectralVectorField& f, const SpectralVectorField& g) {
  require_same_grid(f.grid(), g.grid());
  return {f, g, curl(g), true};
}

inline ForceTriple make_forces(const SpectralVectorField& f, const SpectralVectorField& g,
                               const SpectralVectorField& h) {
  require_same_grid(f.grid(), g.grid());
  require_same_grid(f.grid(), h.grid());
  return {f, g, h, false};
}

inline ForceTriple operator*(double s, const ForceTriple& F) {
  return {s * F.f, s * F.g, s * F.curl_g_data, F.curl_g_derived};
}

/// F -> lambda^3 F(lambda .) and U -> lambda U(lambda .), realised on the box of side L/lambda.
inline ForceTriple scale_forces(const ForceTriple& F, double lambda) {
  const double a = lambda * lambda * lambda;
  return {rescale(F.f, lambda, a), rescale(F.g, lambda, a), rescale(F.curl_g_data, lambda, a), F.curl_g_derived};
}
inline HallState scale_state(const HallState& U, double lambda) {
  return {rescale(U.u, lambda, lambda), rescale(U.B, lambda, lambda), rescale(U.J, lambda, lambda)};
}

struct StateNorms {
  BesovIndex index;
  double u = 0, B = 0, J = 0;
};

struct SolveReport {
  std::string mode;
  int iterates = 0;
  std::vector<double> residuals;     // fixed point: S-norm of successive differences
  std::vector<double> series_norms;  // series: ||A_m||_S
  std::vector<StateNorms> final_norms;
  bool converged = false;
  bool residual_monotone = true;
  bool aliasing = false;
  double consistency = 0.0;  // ||J - curl B||_2 / ||J||_2
  double max_divergence = 0.0;
  std::vector<std::string> warnings;
};

struct NonConvergence : std::runtime_error {
  SolveReport report;
  NonConvergence(const std::string& what, SolveReport r) : std::runtime_error(what), report(std::move(r)) {}
};

/// S-norm used for stopping and the series: Theorem 1.1 indices at p = 2, r = 2.
inline double s_norm(const DyadicPartition& part, const HallState& U) {
  return besov_norm(part, U.u, {0.5, 2.0, 1.0}) + besov_norm(part, U.B, {0.5, 2.0, 2.0}) +
         besov_norm(part, U.J, {0.5, 2.0, 1.0});
}

/// Data norm ||(f, g, curl_g_data)||_{B^{-3/2}_{2,r}}, blocks combined over all nine components.
inline double data_norm(const DyadicPartition& part, const ForceTriple& F, double r) {
  std::vector<const SpectralField*> comps;
  for (const auto* v : {&F.f, &F.g, &F.curl_g_data})
    for (int a = 0; a < 3; ++a) comps.push_back(&(*v)[a]);
  return besov_norm(part, comps, {-1.5, 2.0, r});
}

/// ||(u, B, v)||_{B^{s}_{2,r}} over the nine components.
inline double triple_norm(const DyadicPartition& part, const SpectralVectorField& a, const SpectralVectorField& b,
                          const SpectralVectorField& c, const BesovIndex& idx) {
  std::vector<const SpectralField*> comps;
  for (const auto* v : {&a, &b, &c})
    for (int k = 0; k < 3; ++k) comps.push_back(&(*v)[k]);
  return besov_norm(part, comps, idx);
}

inline double l2_inner(const SpectralVectorField& a, const SpectralVectorField& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < a[k].c.size(); ++i) s += (a[k].c[i] * std::conj(b[k].c[i])).real();
  return s * a.grid().volume();
}

}  // namespace hmhd
