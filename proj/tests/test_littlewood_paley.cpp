#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace hmhd;
using namespace testing_support;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double mean_abs_cos_pow(double p) { return std::tgamma((p + 1) / 2) / (std::sqrt(M_PI) * std::tgamma(p / 2 + 1)); }

}  // namespace

TEST_CASE("partition profile", "[partition]") {
  CHECK(DyadicPartition::partition_phi(0.7) == 0.0);
  CHECK(DyadicPartition::partition_phi(2.7) == 0.0);
  CHECK(DyadicPartition::partition_phi(1.45) == 1.0);
  CHECK_THAT(DyadicPartition::partition_phi(1.0) + DyadicPartition::partition_phi(2.0), WithinAbs(1.0, 1e-15));
  // chi is a smooth step: strictly between 0 and 1 on the transition
  CHECK(DyadicPartition::chi(1.0) > 0.0);
  CHECK(DyadicPartition::chi(1.0) < 1.0);
}

TEST_CASE("partition construction", "[partition]") {
  const Grid g(1.0, 64);
  const auto part = build_partition(g);
  CHECK(part.j_min == -2);
  CHECK(part.j_max == std::int32_t(std::ceil(std::log2(g.xi_max()))) + 2);
  double s = 0;
  for (const auto& jw : part.weights_k2(1)) s += jw.second;
  CHECK_THAT(s, WithinAbs(1.0, 1e-12));

  for (long k2 = 1; k2 <= 3L * 32 * 32; ++k2) {
    const auto& w = part.weights_k2(k2);
    REQUIRE(w.size() <= 2);
    if (w.size() == 2) CHECK(w[1].first - w[0].first == 1);
  }
  CHECK_THROWS_AS(build_partition(g, 1), ConfigError);
}

TEST_CASE("block operators", "[partition]") {
  SECTION("single mode at 1.45*2^j is returned unchanged by its block") {
    const int j = 2;
    const Grid g(4.0 / (1.45 * std::ldexp(1.0, j)), 32);
    const auto part = build_partition(g);
    const auto m = trig_mode(g, 4, 0, 0, false);
    CHECK(rel_diff(delta_j(part, m, j), m) == 0.0);
    CHECK(max_abs_coeff(delta_j(part, m, j + 1)) == 0.0);
    CHECK(max_abs_coeff(delta_j(part, m, j - 1)) == 0.0);
  }

  const Grid g(1.0, 32);
  const auto part = build_partition(g);
  const auto u = rand_scalar(g, 17);

  SECTION("blocks two apart are disjoint") {
    for (int j = part.j_min; j <= part.j_max; ++j)
      for (int jp = j + 2; jp <= part.j_max; ++jp)
        CHECK(max_abs_coeff(delta_j(part, delta_j(part, u, j), jp)) == 0.0);
  }

  SECTION("completeness") {
    CHECK(rel_diff(recompose(decompose(part, u), g), u) < 1e-12);
    for (int j = part.j_min; j <= part.j_max; ++j) {
      SpectralField acc = s_j(part, u, j);
      for (int jp = j; jp <= part.j_max; ++jp) add_to(acc, delta_j(part, u, jp));
      CHECK(rel_diff(acc, u) < 1e-12);
    }
  }

  SECTION("out of range blocks vanish") {
    CHECK(max_abs_coeff(delta_j(part, u, part.j_max + 1)) == 0.0);
    CHECK(max_abs_coeff(delta_j(part, u, part.j_min - 1)) == 0.0);
  }
}

TEST_CASE("Besov norms", "[besov]") {
  SECTION("zero field") {
    const Grid g(1.0, 16);
    const auto part = build_partition(g);
    CHECK(besov_norm(part, SpectralField(g), {0.5, 2.0, 1.0}) == 0.0);
    CHECK(triebel_lizorkin_norm(part, SpectralField(g), {0.5, 2.0, 2.0}) == 0.0);
  }

  SECTION("single block mode: 2^{js} times the plane-wave L^p norm") {
    const int j = 2;
    const Grid g(4.0 / (1.45 * std::ldexp(1.0, j)), 32);
    const auto part = build_partition(g);
    const auto m = trig_mode(g, 4, 0, 0, false);
    const double vol = g.volume();
    for (double p : {2.0, 4.0}) {
      for (double s : {-0.75, 0.0, 1.25}) {
        const double expect = std::pow(2.0, j * s) * std::pow(vol * mean_abs_cos_pow(p), 1.0 / p);
        for (double r : {1.0, 2.0, inf}) {
          CHECK_THAT(besov_norm(part, m, {s, p, r}), WithinRel(expect, 1e-12));
          CHECK_THAT(triebel_lizorkin_norm(part, m, {s, p, r}), WithinRel(expect, 1e-12));
        }
      }
    }
    CHECK_THAT(besov_norm(part, m, {0.0, inf, 2.0}), WithinRel(1.0, 1e-12));
  }

  const Grid g(1.0, 32);
  const auto part = build_partition(g);

  SECTION("dyadic scaling through the halved box") {
    // interior-supported field: keep the spectrum away from the partition edges
    auto u = rand_scalar(g, 5);
    u = spectral_cutoff(u, 8.0);
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
      if (k0 * k0 + k1 * k1 + k2 * k2 < 4) u.c[i] = 0.0;
    });
    const auto u2 = rescale(u, 2.0, 1.0);
    const auto part2 = build_partition(u2.grid);
    for (double p : {1.0, 2.0, 3.0}) {
      for (double s : {-0.5, 0.0, 0.5, 1.5}) {
        const double ratio = besov_norm(part2, u2, {s, p, 2.0}) / besov_norm(part, u, {s, p, 2.0});
        CHECK_THAT(ratio, WithinRel(std::pow(2.0, s - 3.0 / p), 1e-12));
      }
    }
  }

  SECTION("monotone in r") {
    const auto u = rand_scalar(g, 9);
    for (double p : {1.5, 2.0, 3.0}) {
      const double a = besov_norm(part, u, {0.3, p, 1.0});
      const double b = besov_norm(part, u, {0.3, p, 2.0});
      const double c = besov_norm(part, u, {0.3, p, inf});
      CHECK(b <= a);
      CHECK(c <= b);
    }
  }

  SECTION("Bernstein embedding ratios stay bounded") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto u = rand_scalar(g, 100 + seed, 0.5 + 0.4 * seed);
      const double hi = besov_norm(part, u, {0.5 - 3 * (1 / 1.5 - 1 / 4.0), 4.0, 2.0});
      const double lo = besov_norm(part, u, {0.5, 1.5, 2.0});
      CHECK(hi / lo < 10.0);
    }
  }

  SECTION("vector and component forms agree") {
    const auto v = rand_vector(g, 3, true);
    CHECK(besov_norm(part, v, {0.5, 2.0, 2.0}) == besov_norm(part, components(v), {0.5, 2.0, 2.0}));
    // at p = 2 the vector block norm is the l2 sum of component block norms
    const auto b = block_norms(part, v, {2.0})[0];
    std::vector<double> sq(b.size(), 0.0);
    for (int a = 0; a < 3; ++a) {
      const auto ba = block_norms(part, v[a], {2.0})[0];
      for (std::size_t i = 0; i < b.size(); ++i) sq[i] += ba[i] * ba[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) CHECK_THAT(b[i], WithinRel(std::sqrt(sq[i]), 1e-12) || WithinAbs(0.0, 1e-300));
  }

  SECTION("index validation") {
    const auto u = rand_scalar(g, 1);
    CHECK_THROWS_AS(besov_norm(part, u, {0.0, 0.5, 2.0}), ConfigError);
    CHECK_THROWS_AS(besov_norm(part, u, {0.0, 2.0, 0.5}), ConfigError);
    CHECK_THROWS_AS(triebel_lizorkin_norm(part, u, {0.0, inf, 2.0}), ConfigError);
  }
}

TEST_CASE("Triebel-Lizorkin F^0_{p,2} against L^p", "[besov]") {
  const Grid g(1.0, 32);
  const auto part = build_partition(g);
  double lo = 1e300, hi = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto u = rand_scalar(g, 200 + seed, 0.5 + 0.25 * seed);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const double q = triebel_lizorkin_norm(part, u, {0.0, p, 2.0}) / lp_norm(u, p);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  }
  UNSCOPED_INFO("F^0_{p,2}/L^p in [" << lo << ", " << hi << "]");
  CHECK(lo > 1.0 / 3.0);
  CHECK(hi < 3.0);
}

TEST_CASE("Bony decomposition", "[bony]") {
  SECTION("T with zero") {
    const Grid g(1.0, 16);
    const auto part = build_partition(g);
    CHECK(max_abs_coeff(paraproduct_T(part, SpectralField(g), rand_scalar(g, 1))) == 0.0);
  }

  SECTION("separated blocks: the low-high paraproduct is the whole product") {
    const Grid g(1.0, 64);
    const auto part = build_partition(g);
    const auto u = trig_mode(g, 1, 0, 0, false);
    const auto v = trig_mode(g, 0, 0, 20, true);
    const auto uv = pointwise_product(u, v);
    CHECK(rel_diff(paraproduct_T(part, u, v), uv) < 1e-13);
    CHECK(max_abs_coeff(paraproduct_T(part, v, u)) < 1e-15);
    CHECK(max_abs_coeff(remainder_R(part, u, v)) < 1e-15);
  }

  SECTION("identity on a random 64^3 pair") {
    const Grid g(1.0, 64);
    const auto part = build_partition(g);
    const auto u = rand_scalar(g, 61), v = rand_scalar(g, 62, 1.5);
    const auto d = pointwise_product(u, v) - paraproduct_T(part, u, v) - paraproduct_T(part, v, u) -
                   remainder_R(part, u, v);
    CHECK(l2_norm(d) <= 1e-10 * l2_norm(u) * l2_norm(v));
  }
}

TEST_CASE("commutator", "[bony]") {
  const Grid g(1.0, 32);
  const auto part = build_partition(g);
  const auto a = rand_scalar(g, 71), b = rand_scalar(g, 72);
  CHECK(max_abs_coeff(commutator(part, 2, SpectralField(g), a)) == 0.0);

  SECTION("low mode a: commutator is Delta_j(ba)") {
    const auto lo = trig_mode(g, 1, 0, 0, true);
    const int j = 3;
    CHECK(rel_diff(commutator(part, j, b, lo), delta_j(part, pointwise_product(b, lo), j)) == 0.0);
  }

  SECTION("random pair equals the two-term difference") {
    for (int j = part.j_min; j <= part.j_max; ++j) {
      const auto direct = delta_j(part, pointwise_product(b, a), j) - pointwise_product(b, delta_j(part, a, j));
      CHECK(rel_diff(commutator(part, j, b, a), direct) == 0.0);
    }
  }

  SECTION("b = 0 gives a vanishing left-hand side") {
    CHECK(commutator_ratio(part, -0.5, 2.0, inf, 4.0, SpectralField(g), a) < 0);
  }
}

TEST_CASE("product law audits", "[audit]") {
  const Grid g(1.0, 32);
  const auto part = build_partition(g);

  SECTION("degenerate pair is skipped") {
    const auto u = rand_scalar(g, 1);
    for (auto law : {ProductLaw::pl_2, ProductLaw::pl_1, ProductLaw::pl_minus_half, ProductLaw::pl_minus_3quarters})
      CHECK(law_ratio(part, law, {2.0, 2.0, 4.0, 4.0}, u, SpectralField(g)) < 0);
  }

  SECTION("parameter validation") {
    CHECK_THROWS_AS(validate_law(ProductLaw::pl_2, {6.0, 2.0, 2.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(validate_law(ProductLaw::pl_1, {2.0, 2.0, 2.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(validate_law(ProductLaw::ns_bilinear, {3.0, 1.5, 2.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(validate_law(ProductLaw::ns_bilinear, {3.0, 2.5, 2.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(validate_commutator(2.0, 2.0, inf, 4.0), ConfigError);
    CHECK_THROWS_AS(validate_commutator(0.0, 2.0, 2.0, 4.0), ConfigError);
    CHECK_THROWS_AS(validate_commutator(0.0, 2.0, inf, 0.5), ConfigError);
    CHECK_THROWS_AS(parse_law("pl_3"), ConfigError);
    CHECK(parse_law("pl_minus_3quarters") == ProductLaw::pl_minus_3quarters);
  }

  SECTION("pl_2 is resolution stable between 32^3 and 64^3") {
    EnsembleSpec e32{Grid(1.0, 32), 100, 7};
    EnsembleSpec e64{Grid(1.0, 64), 100, 7};
    const auto a = audit_product_law(e32, ProductLaw::pl_2, {2.0, 2.0, 2.0, 2.0});
    const auto b = audit_product_law(e64, ProductLaw::pl_2, {2.0, 2.0, 2.0, 2.0});
    CHECK(a.n_samples == 100);
    CHECK(std::isfinite(b.max_ratio));
    CHECK(b.max_ratio <= 2 * a.max_ratio);
    CHECK(a.max_ratio <= 2 * b.max_ratio);
    CHECK(b.p95_ratio <= b.max_ratio);
  }

  SECTION("ns_bilinear ratio is bounded") {
    EnsembleSpec e{Grid(1.0, 32), 12, 3};
    const auto st = audit_product_law(e, ProductLaw::ns_bilinear, {3.0, 2.0, 2.0, 2.0});
    CHECK(st.n_samples == 12);
    CHECK(std::isfinite(st.max_ratio));
    CHECK(st.max_ratio > 0);
  }

  SECTION("commutator audits at the two solver usages") {
    EnsembleSpec e{Grid(1.0, 32), 10, 5};
    const auto a = audit_commutator(e, -0.5, 2.0, inf, 4.0);
    const auto b = audit_commutator(e, -1.0, 2.0, inf, 2.0);
    CHECK(std::isfinite(a.max_ratio));
    CHECK(std::isfinite(b.max_ratio));
    CHECK(a.n_samples == 10);
  }

  SECTION("audits are deterministic in the seed") {
    EnsembleSpec e{Grid(1.0, 16), 5, 11};
    const auto a = audit_product_law(e, ProductLaw::pl_minus_half, {2.0, 2.0, 2.0, 2.0});
    const auto b = audit_product_law(e, ProductLaw::pl_minus_half, {2.0, 2.0, 2.0, 2.0});
    CHECK(a.ratios == b.ratios);
  }
}
