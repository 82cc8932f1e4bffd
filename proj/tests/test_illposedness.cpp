#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace hmhd;
using namespace testing_support;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

InflationConfig desk(int n) {
  InflationConfig c;
  c.n = n;
  c.epsilon = 1.0;
  c.block_rule = BlockRule::relaxed_all_k;
  c.N = 256;
  return c;
}

// (Rv)(x) = S v(S x) with S swapping the first two coordinates.
SpectralVectorField reflect12(const SpectralVectorField& v) {
  const Grid& g = v.grid();
  SpectralVectorField out(g, v.real());
  const int src[3] = {1, 0, 2};
  for (int a = 0; a < 3; ++a)
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) { out[a].c[i] = v[src[a]].mode(k1, k0, k2); });
  return out;
}

double max_abs_diff(const SpectralVectorField& x, const SpectralVectorField& y, double sy = 1.0) {
  double d = 0;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < x[a].c.size(); ++i) d = std::max(d, std::abs(x[a].c[i] - sy * y[a].c[i]));
  return d;
}

bool log_convex_in_inverse_p(const std::vector<double>& ps, const std::vector<double>& norms) {
  for (std::size_t i = 1; i + 1 < ps.size(); ++i) {
    const double t0 = 1 / ps[i - 1], t = 1 / ps[i], t1 = 1 / ps[i + 1];
    const double w = (t - t1) / (t0 - t1);
    const double chord = w * std::log(norms[i - 1]) + (1 - w) * std::log(norms[i + 1]);
    if (std::log(norms[i]) > chord + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("ns bilinear map", "[ns]") {
  const Grid g(1.0, 32);
  const double mu = 0.7;
  SECTION("zero input") {
    const SpectralVectorField z(g);
    CHECK(max_abs_coeff(ns_bilinear(z, z, mu)) == 0.0);
  }
  SECTION("matches the Hall-MHD map with B = J = 0") {
    HallState U(g);
    U.u = rand_vector(g, 11, true);
    const PhysicalParams prm{mu, 1.3, 0.4};
    const HallState NU = nonlinear_N(U, U, prm);
    CHECK(rel_diff(ns_bilinear(U.u, U.u, mu), NU.u) < 1e-13);
    CHECK(max_abs_coeff(NU.B) == 0.0);
  }
  SECTION("two-mode oracle") {
    const Grid gL(1.7, 32);
    const int k[3] = {2, -1, 3}, l[3] = {1, 2, -1};
    const double al[3] = {0.3, -0.8, 0.5}, be[3] = {-0.6, 0.2, 0.9};
    SpectralVectorField u(gL), v(gL);
    for (int a = 0; a < 3; ++a) {
      u[a] = trig_mode(gL, k[0], k[1], k[2], false, al[a]);
      v[a] = trig_mode(gL, l[0], l[1], l[2], false, be[a]);
    }
    const SpectralVectorField N = ns_bilinear(u, v, mu);
    SpectralVectorField expect(gL);
    for (int sk : {1, -1})
      for (int sl : {1, -1}) {
        const int m[3] = {sk * k[0] + sl * l[0], sk * k[1] + sl * l[1], sk * k[2] + sl * l[2]};
        const double m2 = double(m[0]) * m[0] + double(m[1]) * m[1] + double(m[2]) * m[2];
        const double bm = be[0] * m[0] + be[1] * m[1] + be[2] * m[2];
        const double am = al[0] * m[0] + al[1] * m[1] + al[2] * m[2];
        const cplx pre = -(gL.L * gL.L) / (mu * m2) * cplx(0, bm / (4 * gL.L));
        for (int a = 0; a < 3; ++a) expect[a].mode(m[0], m[1], m[2]) += pre * (al[a] - m[a] * am / m2);
      }
    CHECK(max_abs_diff(N, expect) < 1e-15);
    CHECK(relative_divergence(N) < 1e-14);
  }
  SECTION("validation") {
    const SpectralVectorField z(g);
    CHECK_THROWS_AS(ns_bilinear(z, z, 0.0), ConfigError);
  }
}

TEST_CASE("theta profile", "[profiles]") {
  const ThetaProfile th{0.6};
  CHECK(th.hat(0.6) == 1.0);
  CHECK(th.hat(-0.6) == 1.0);
  CHECK(th.hat(1.2) == 0.0);
  for (double x = 0; x < 1.5; x += 0.013) {
    CHECK(th.hat(x) >= 0.0);
    CHECK(th.hat(x) <= 1.0);
  }
  // theta is real and even with theta(0) = (1/2pi) int theta-hat
  const auto& s = theta_samples(0.6);
  const std::size_t mid = s.t.size() / 2;
  CHECK(s.t[mid] == 0.0);
  CHECK_THAT(s.v[mid + 7], WithinRel(s.v[mid - 7], 1e-12));
  CHECK_THAT(s.v[mid], WithinRel(0.6 * 3 / (2 * M_PI), 1e-6));  // step is antisymmetric about 1.5a
  CHECK_THAT(mean_abs_sin_pow(2.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(mean_abs_sin_pow(1.0), WithinAbs(2 / M_PI, 1e-15));
}

TEST_CASE("block sets and feasibility", "[inflation]") {
  InflationConfig c = desk(6);
  CHECK(c.r() == 1.0);
  c.epsilon = 0.5;
  CHECK(c.r() == 3.0 / 2.5);
  CHECK(block_set(desk(6)) == std::vector<int>{2, 3});

  InflationConfig p = desk(32);
  p.block_rule = BlockRule::paper_8N;
  CHECK(block_set(p) == std::vector<int>{8, 16});
  const DeskLayout d = desk_layout(p);
  CHECK_FALSE(d.feasible);
  CHECK(d.reason.find("frequency overflow") != std::string::npos);
  CHECK_THROWS_AS(synthesize_bn(p, d), ConfigError);

  p.n = 12;
  CHECK(block_set(p).empty());
  CHECK(desk_layout(p).reason == "empty block set");

  for (int n : {5, 6, 7}) {
    const DeskLayout dl = desk_layout(desk(n));
    REQUIRE(dl.feasible);
    CHECK(dl.shift == 6 - n);
    CHECK(dl.atoms.size() == 2);
  }
  CHECK_FALSE(desk_layout([] {
                InflationConfig x = desk(5);
                x.N = 128;
                return x;
              }())
                  .feasible);

  InflationConfig bad = desk(5);
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(parse_block_rule("16N"), ConfigError);
  CHECK(parse_block_rule("paper_8N") == BlockRule::paper_8N);
}

TEST_CASE("infeasible sweep rows do not stop the sweep", "[inflation]") {
  InflationConfig p = desk(32);
  p.block_rule = BlockRule::paper_8N;
  SweepOptions opt;
  opt.solve_picard = false;
  const auto rows = inflation_sweep(p, {32, 12}, opt);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].feasible);
  CHECK_FALSE(rows[1].feasible);
  CHECK(std::isnan(rows[0].norm_g_B031));
}

TEST_CASE("c_n multiplier needs xi2 away from zero", "[inflation]") {
  const Grid g(1.0, 16);
  SpectralField b = trig_mode(g, 3, 0, 1, true);
  CHECK_THROWS_AS(synthesize_cn(b), DomainError);
  SpectralField ok = trig_mode(g, 3, 2, 1, true);
  const SpectralField c = synthesize_cn(ok);
  CHECK_THAT(std::abs(c.mode(3, 2, 1)), WithinRel(std::abs(ok.mode(3, 2, 1)) / 2, 1e-15));
}

TEST_CASE("block seminorm", "[seminorm]") {
  const Grid g(1.0, 64);
  const auto part = build_partition(g);
  const SpectralField m = trig_mode(g, 6, 0, 0, false);  // |xi| = 6 lies in block 2 only
  REQUIRE(part.weights_k2(36).size() == 1);
  REQUIRE(part.weights_k2(36)[0].first == 2);
  CHECK(seminorm_block(part, m, {3, 4}, 1.0) == 0.0);
  CHECK_THAT(seminorm_block(part, m, {2}, 1.3), WithinRel(lp_norm(m, 3.0), 1e-12));
  const SpectralVectorField v = rand_vector(g, 4, true);
  for (double q : {1.0, 1.2, 2.0})
    CHECK(seminorm_block(part, v, {1, 2, 3}, q) <= besov_norm(part, v, {0.0, 3.0, q}) * (1 + 1e-12));
  CHECK_THROWS_AS(seminorm_block(part, v, {}, 1.0), ConfigError);
  CHECK_THROWS_AS(seminorm_block(part, v, {part.j_max + 1}, 1.0), ConfigError);
}

TEST_CASE("desk g_n at n = 6", "[inflation][desk]") {
  const InflationConfig cfg = desk(6);
  const DeskLayout d = desk_layout(cfg);
  REQUIRE(d.feasible);
  const auto part = build_partition(d.grid());
  SpectralVectorField g = synthesize_gn(cfg, d);

  CHECK(relative_divergence(g) <= 1e-12);
  // b is symmetric under x1 <-> x2 by construction
  double asym = 0;
  for_each_mode(g.grid(), [&](std::size_t i, int k0, int k1, int k2) {
    asym = std::max(asym, std::abs(g[0].c[i] - g[0].mode(k1, k0, k2)));
  });
  CHECK(asym == 0.0);

  for (int a = 0; a < 2; ++a) {
    const double tot = coeff_energy(g[a]);
    CHECK(coeff_energy(delta_j(part, g[a], 6)) >= 0.9999 * tot);
    CHECK(coeff_energy(delta_j(part, g[a], 5)) <= 1e-4 * tot);
    CHECK(coeff_energy(delta_j(part, g[a], 7)) <= 1e-4 * tot);
    CHECK(coeff_energy(delta_j(part, g[a], 4)) <= 1e-12 * tot);
  }

  SpectralVectorField G = compute_Gn(g, cfg.mu);
  const auto ks = block_set(cfg);
  const double sem = seminorm_block(part, G, ks, cfg.r());
  CHECK(sem > 1e-3 * besov_norm(part, G, {0.0, 3.0, cfg.r()}));

  // bilinearity with an exact power-of-two factor
  for (int a = 0; a < 3; ++a)
    for (auto& c : g[a].c) c *= 0.5;
  {
    const SpectralVectorField Gs = compute_Gn(g, cfg.mu);
    CHECK(max_abs_diff(Gs, G, 0.25) <= 1e-15 * max_abs_coeff(G));
  }
  for (int a = 0; a < 3; ++a)
    for (auto& c : g[a].c) c *= 2.0;

  SpectralVectorField Rg = reflect12(g);
  g = SpectralVectorField();
  const SpectralVectorField NR = compute_Gn(Rg, cfg.mu);
  Rg = SpectralVectorField();
  CHECK(max_abs_diff(NR, reflect12(G)) <= 1e-13 * max_abs_coeff(G));
}

TEST_CASE("semianalytic atom norms", "[semianalytic]") {
  SECTION("single atom matches the grid L3 norm to 1%") {
    InflationConfig cfg = desk(6);
    cfg.relaxed_width = 1;
    const DeskLayout d = desk_layout(cfg);
    REQUIRE(d.atoms.size() == 1);
    const SpectralField b = synthesize_bn(cfg, d);
    const AtomNorms an = semianalytic_atom_norms(cfg, d, 3.0);
    CHECK(an.per_atom.size() == 1);
    CHECK_THAT(an.aggregate, WithinRel(lp_norm_oversampled(b, 3.0), 0.01));
  }
  SECTION("p = 1 atom norms scale as 2^{-2k} eps^{-2}") {
    InflationConfig cfg = desk(9);
    cfg.relaxed_width = 3;
    cfg.min_separation = 0;
    const DeskLayout d = desk_layout(cfg);
    const AtomNorms an = semianalytic_atom_norms(cfg, d, 1.0, false);
    REQUIRE(an.per_atom.size() == 3);
    // amplitude carries 2^k, so the atom norm ratio is 2^{-2} per step in k
    const double amp_ratio = d.atoms[1].amplitude / d.atoms[0].amplitude;
    CHECK(amp_ratio == 2.0);
    CHECK_THAT(an.per_atom[1] / an.per_atom[0], WithinRel(0.25, 1e-13));
    CHECK_THAT(an.per_atom[2] / an.per_atom[1], WithinRel(0.25, 1e-13));
    InflationConfig half = cfg;
    half.epsilon = 0.5;
    const DeskLayout dh = desk_layout(half);
    const AtomNorms ah = semianalytic_atom_norms(half, dh, 1.0, false);
    const double amp = dh.atoms[0].amplitude / d.atoms[0].amplitude;
    CHECK_THAT(ah.per_atom[0] / (amp * an.per_atom[0]), WithinRel(4.0, 1e-13));
  }
  SECTION("log-convexity in 1/p and the c_n bound") {
    const InflationConfig cfg = desk(5);
    const DeskLayout d = desk_layout(cfg);
    const SpectralField b = synthesize_bn(cfg, d);
    const std::vector<double> ps{1.0, 1.5, 2.0, 3.0};
    std::vector<double> grid, semi;
    for (double p : ps) {
      grid.push_back(lp_norm(b, p));
      semi.push_back(semianalytic_atom_norms(cfg, d, p, false).aggregate);
    }
    CHECK(log_convex_in_inverse_p(ps, grid));
    CHECK(log_convex_in_inverse_p(ps, semi));
    const AtomNorms a2 = semianalytic_atom_norms(cfg, d, 2.0);
    CHECK(l2_norm(synthesize_cn(b)) <= a2.multiplier_sup * l2_norm(b));
    CHECK(a2.overlap_bound < cfg.max_overlap);
    CHECK_THROWS_AS(semianalytic_atom_norms(cfg, d, 1.0), AggregationError);
    CHECK_THROWS_AS(semianalytic_atom_norms(cfg, d, 3.5), ConfigError);
  }
}
