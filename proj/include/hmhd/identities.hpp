#pragma once

#include <random>
#include <string>
#include <vector>

#include "hall/solver.hpp"
#include "lp/bony.hpp"

namespace hmhd {

struct IdentityCheck {
  std::string name;
  int grid_N = 0;
  std::uint64_t seed = 0;
  double value = 0;
  double tol = 1e-10;
  bool pass() const { return value <= tol; }
};

enum class IdentitySet { all, cancellation };

/// Exact identities on random fields; every value is relative and should sit at round-off.
inline std::vector<IdentityCheck> identity_suite(const Grid& g, std::uint64_t seed, IdentitySet which = IdentitySet::all,
                                                 double tol = 1e-10) {
  std::mt19937_64 rng(seed);
  const int K = default_band(g);
  std::vector<IdentityCheck> out;
  auto push = [&](const char* name, double v) { out.push_back({name, g.N, seed, v, tol}); };

  const SpectralVectorField B = random_vector_field(g, rng, 1.0, K, true);
  const SpectralVectorField v = random_vector_field(g, rng, 1.5, K, true);
  if (which == IdentitySet::all) {
    const SpectralVectorField w = random_vector_field(g, rng, 1.0, K, false);
    const SpectralVectorField Pw = leray_project(w);
    push("leray_idempotence", rel_diff(leray_project(Pw), Pw));
    push("leray_div_annihilation", relative_divergence(Pw));
    push("curl_biot_savart", rel_diff(curl(biot_savart(B)), B));
    push("div_curl", relative_divergence(curl(w)));

    const DyadicPartition part = build_partition(g);
    const SpectralField a = random_field(g, rng, 1.0, K);
    const SpectralField b = random_field(g, rng, 1.5, K);
    const SpectralField ab = pointwise_product(a, b);
    SpectralField d = ab - paraproduct_T(part, a, b);
    add_to(d, paraproduct_T(part, b, a), -1.0);
    add_to(d, remainder_R(part, a, b), -1.0);
    push("bony_residual", std::sqrt(coeff_energy(d) / coeff_energy(ab)));
  }
  const CancellationPairings c = cancellation_check(v, B);
  push("cancellation_curl", c.curl_pairing);
  push("cancellation_cross", c.cross_pairing);
  push("cancellation_v", c.v_pairing);
  return out;
}

}  // namespace hmhd
