#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "../inflation/ns.hpp"
#include "besov.hpp"
#include "bony.hpp"

namespace hmhd {

enum class ProductLaw { pl_2, pl_1, pl_minus_half, pl_minus_3quarters, ns_bilinear };

inline const char* to_string(ProductLaw l) {
  switch (l) {
    case ProductLaw::pl_2: return "pl_2";
    case ProductLaw::pl_1: return "pl_1";
    case ProductLaw::pl_minus_half: return "pl_minus_half";
    case ProductLaw::pl_minus_3quarters: return "pl_minus_3quarters";
    case ProductLaw::ns_bilinear: return "ns_bilinear";
  }
  return "?";
}

inline ProductLaw parse_law(const std::string& s) {
  for (auto l : {ProductLaw::pl_2, ProductLaw::pl_1, ProductLaw::pl_minus_half, ProductLaw::pl_minus_3quarters,
                 ProductLaw::ns_bilinear})
    if (s == to_string(l)) return l;
  throw ConfigError("unknown product law '" + s + "'");
}

/// Random pairs: each field gets its own spectral slope beta drawn uniformly in [beta_min, beta_max];
/// spectra are tapered to the grid's 2/3 band (see random_field).
struct EnsembleSpec {
  Grid grid;
  int samples = 100;
  std::uint64_t seed = 1;
  double beta_min = 0.5;
  double beta_max = 2.5;
};

/// p, r for every law; r1, r2 only for pl_1.
struct LawParams {
  double p = 2.0;
  double r = 2.0;
  double r1 = 2.0;
  double r2 = 2.0;
};

struct RatioStats {
  std::string law;
  double s = 0, p = 0, r = 0;
  int grid_N = 0;
  int n_samples = 0;
  int n_skipped = 0;
  double max_ratio = 0;
  double p95_ratio = 0;
  std::vector<double> ratios;
};

namespace detail {

inline void finish_stats(RatioStats& st) {
  st.n_samples = int(st.ratios.size());
  if (st.ratios.empty()) return;
  std::vector<double> r = st.ratios;
  std::sort(r.begin(), r.end());
  st.max_ratio = r.back();
  const std::size_t k = std::size_t(std::ceil(0.95 * r.size())) - 1;
  st.p95_ratio = r[std::min(k, r.size() - 1)];
}

inline void check_r(double r) {
  if (!(r >= 1.0)) throw ConfigError("summation index r must be in [1, inf]");
}

}  // namespace detail

inline void validate_law(ProductLaw law, const LawParams& lp) {
  detail::check_r(lp.r);
  switch (law) {
    case ProductLaw::pl_2:
      if (!(lp.p >= 1.0 && lp.p < 6.0)) throw ConfigError("pl_2 needs 1 <= p < 6");
      break;
    case ProductLaw::pl_1: {
      if (!(lp.p >= 1.0 && lp.p < 3.0)) throw ConfigError("pl_1 needs 1 <= p < 3");
      detail::check_r(lp.r1);
      detail::check_r(lp.r2);
      if (std::abs(1.0 / lp.r1 + 1.0 / lp.r2 - 1.0 / lp.r) > 1e-12)
        throw ConfigError("pl_1 needs 1/r1 + 1/r2 = 1/r");
      break;
    }
    case ProductLaw::pl_minus_half:
    case ProductLaw::pl_minus_3quarters:
      break;
    case ProductLaw::ns_bilinear:
      if (!(lp.r > 1.5 && lp.r <= 2.0)) throw ConfigError("ns_bilinear needs 3/2 < r <= 2");
      break;
  }
}

/// Regularity index of the left-hand side of each law.
inline double law_lhs_s(ProductLaw law, double p) {
  switch (law) {
    case ProductLaw::pl_2: return 3.0 / p - 1.0;
    case ProductLaw::pl_1: return 3.0 / p - 2.0;
    case ProductLaw::pl_minus_half: return -0.5;
    case ProductLaw::pl_minus_3quarters: return -0.75;
    case ProductLaw::ns_bilinear: return 0.0;
  }
  return 0.0;
}

/// LHS / RHS of one law on one pair; returns a negative value when the RHS vanishes.
inline double law_ratio(const DyadicPartition& part, ProductLaw law, const LawParams& lp,
                        const SpectralField& u, const SpectralField& v) {
  const SpectralField uv = pointwise_product(u, v);
  switch (law) {
    case ProductLaw::pl_2: {
      const double s = 3.0 / lp.p - 1.0;
      const auto bu = block_norms(part, u, {lp.p});
      const auto bv = block_norms(part, v, {lp.p});
      const double lhs = besov_from_blocks(part, block_norms(part, uv, {lp.p})[0], s, lp.r);
      const double rhs = besov_from_blocks(part, bu[0], s, lp.r) *
                         (besov_from_blocks(part, bv[0], 3.0 / lp.p, inf) + lp_norm(v, inf));
      return rhs > 0 ? lhs / rhs : -1.0;
    }
    case ProductLaw::pl_1: {
      const double s = 3.0 / lp.p - 1.0;
      const auto bu = block_norms(part, u, {lp.p});
      const auto bv = block_norms(part, v, {lp.p});
      const double lhs = besov_from_blocks(part, block_norms(part, uv, {lp.p})[0], s - 1.0, lp.r);
      const double rhs = besov_from_blocks(part, bu[0], s, lp.r1) * besov_from_blocks(part, bv[0], s, lp.r2);
      return rhs > 0 ? lhs / rhs : -1.0;
    }
    case ProductLaw::pl_minus_half: {
      const double lhs = besov_norm(part, uv, {-0.5, 2.0, lp.r});
      const double rhs = besov_norm(part, u, {0.5, 2.0, lp.r}) * besov_norm(part, v, {0.5, 2.0, lp.r});
      return rhs > 0 ? lhs / rhs : -1.0;
    }
    case ProductLaw::pl_minus_3quarters: {
      const double lhs = besov_norm(part, uv, {-0.75, 2.0, lp.r});
      const double rhs = besov_norm(part, u, {-0.5, 2.0, lp.r}) * besov_norm(part, v, {1.25, 2.0, lp.r});
      return rhs > 0 ? lhs / rhs : -1.0;
    }
    case ProductLaw::ns_bilinear:
      throw ConfigError("ns_bilinear acts on vector fields");
  }
  return -1.0;
}

inline double ns_law_ratio(const DyadicPartition& part, const LawParams& lp, const SpectralVectorField& u,
                           const SpectralVectorField& v, double mu = 1.0) {
  const double lhs = besov_norm(part, ns_bilinear(u, v, mu), {0.0, 3.0, lp.r});
  const double rhs = lp_norm(u, 3.0) * lp_norm(v, 3.0);
  return rhs > 0 ? lhs / rhs : -1.0;
}

inline RatioStats audit_product_law(const EnsembleSpec& ens, ProductLaw law, const LawParams& lp) {
  validate_law(law, lp);
  const DyadicPartition part = build_partition(ens.grid);
  std::mt19937_64 rng(ens.seed);
  std::uniform_real_distribution<double> beta(ens.beta_min, ens.beta_max);
  const int K = default_band(ens.grid);
  RatioStats st;
  st.law = to_string(law);
  st.s = law_lhs_s(law, law == ProductLaw::pl_2 || law == ProductLaw::pl_1 ? lp.p
                        : law == ProductLaw::ns_bilinear                ? 3.0
                                                                        : 2.0);
  st.p = law == ProductLaw::pl_2 || law == ProductLaw::pl_1 ? lp.p : law == ProductLaw::ns_bilinear ? 3.0 : 2.0;
  st.r = lp.r;
  st.grid_N = ens.grid.N;
  for (int n = 0; n < ens.samples; ++n) {
    const double bu = beta(rng), bv = beta(rng);
    double ratio;
    if (law == ProductLaw::ns_bilinear) {
      const auto u = random_vector_field(ens.grid, rng, bu, K, true);
      const auto v = random_vector_field(ens.grid, rng, bv, K, true);
      ratio = ns_law_ratio(part, lp, u, v);
    } else {
      const auto u = random_field(ens.grid, rng, bu, K);
      const auto v = random_field(ens.grid, rng, bv, K);
      ratio = law_ratio(part, law, lp, u, v);
    }
    if (ratio < 0 || !std::isfinite(ratio))
      ++st.n_skipped;
    else
      st.ratios.push_back(ratio);
  }
  detail::finish_stats(st);
  return st;
}

inline void validate_commutator(double s, double r, double rho1, double rho2) {
  if (!(s > -1.5 && s <= 1.5)) throw ConfigError("commutator audit needs s in (-3/2, 3/2]");
  if (!(rho1 > 2.0)) throw ConfigError("commutator audit needs rho1 in (2, inf]");
  if (!(rho2 >= 1.0)) throw ConfigError("commutator audit needs rho2 in [1, inf]");
  detail::check_r(r);
}

/// l^r over j of 2^{js}||[Delta_j, b]a||_2 divided by the two-term right-hand side.
inline double commutator_ratio(const DyadicPartition& part, double s, double r, double rho1, double rho2,
                               const SpectralField& b, const SpectralField& a) {
  const double t1 = std::isinf(rho1) ? 0.0 : 2.0 / rho1;
  const double t2 = std::isinf(rho2) ? 0.0 : 2.0 / rho2;
  std::vector<double> w;
  for (int j = part.j_min; j <= part.j_max; ++j) {
    SpectralField c = commutator(part, j, b, a);
    c.c[0] = 0.0;  // norms exclude the mean
    w.push_back(std::pow(2.0, j * s) * l2_norm(c));
  }
  const double lhs = lr_norm(w, r);
  const auto nb = block_norms(part, b, {2.0})[0];
  const auto na = block_norms(part, a, {2.0})[0];
  const double rhs = besov_from_blocks(part, nb, t1 + 1.5, inf) * besov_from_blocks(part, na, s - t1, r) +
                     besov_from_blocks(part, nb, s + 1.5 + t2, r) * besov_from_blocks(part, na, -t2, inf);
  return rhs > 0 ? lhs / rhs : -1.0;
}

inline RatioStats audit_commutator(const EnsembleSpec& ens, double s, double r, double rho1, double rho2) {
  validate_commutator(s, r, rho1, rho2);
  const DyadicPartition part = build_partition(ens.grid);
  std::mt19937_64 rng(ens.seed);
  std::uniform_real_distribution<double> beta(ens.beta_min, ens.beta_max);
  const int K = default_band(ens.grid);
  RatioStats st;
  st.law = "commutator";
  st.s = s;
  st.p = 2.0;
  st.r = r;
  st.grid_N = ens.grid.N;
  for (int n = 0; n < ens.samples; ++n) {
    const double bb = beta(rng), ba = beta(rng);
    const auto b = random_field(ens.grid, rng, bb, K);
    const auto a = random_field(ens.grid, rng, ba, K);
    const double ratio = commutator_ratio(part, s, r, rho1, rho2, b, a);
    if (ratio < 0 || !std::isfinite(ratio))
      ++st.n_skipped;
    else
      st.ratios.push_back(ratio);
  }
  detail::finish_stats(st);
  return st;
}

}  // namespace hmhd
