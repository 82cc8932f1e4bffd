#include <hmhd/hmhd.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hmhd;

namespace {

using clk = std::chrono::steady_clock;

double seconds_since(clk::time_point t0) { return std::chrono::duration<double>(clk::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

const PhysicalParams unit{1.0, 1.0, 1.0};
const PhysicalParams mixed{1.0, 2.0, 0.5};

SolveOptions options(SolveMode mode, double tol = 1e-13, int max_m = 50) {
  SolveOptions o;
  o.mode = mode;
  o.tol = tol;
  o.max_m = max_m;
  return o;
}

double state_rel(const DyadicPartition& part, const HallState& a, const HallState& b) {
  double e = 0, d = 0;
  for (int i = 0; i < 3; ++i) {
    e += std::pow(besov_norm(part, a[i] - b[i], {0.5, 2.0, 2.0}), 2);
    d += std::pow(besov_norm(part, b[i], {0.5, 2.0, 2.0}), 2);
  }
  return std::sqrt(e / d);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome identities() {
  const auto t0 = clk::now();
  double worst = 0;
  int checks = 0;
  bool ok = true;
  for (int N : {32, 64}) {
    const Grid g(1.0, N);
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      for (const auto& c : identity_suite(g, 1000 + seed)) {
        ++checks;
        worst = std::max(worst, c.value);
        ok = ok && c.pass();
      }
  }
  const double t = seconds_since(t0);
  return {ok && t < 120, std::to_string(checks) + " checks, worst " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome dyadic_scaling() {
  const Grid g(1.0, 32);
  const auto part = build_partition(g);
  std::mt19937_64 rng(5);
  auto u = spectral_cutoff(random_field(g, rng, 1.0, g.dealias_band()), 8.0);
  for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
    if (k0 * k0 + k1 * k1 + k2 * k2 < 4) u.c[i] = 0.0;
  });
  const auto u2 = rescale(u, 2.0, 1.0);
  const auto part2 = build_partition(u2.grid);
  double worst = 0;
  for (auto [s, p] : {std::pair{0.5, 2.0}, {0.0, 3.0}, {-1.5, 2.0}}) {
    const double ratio = besov_norm(part2, u2, {s, p, 2.0}) / besov_norm(part, u, {s, p, 2.0});
    worst = std::max(worst, std::abs(ratio / std::pow(2.0, s - 3.0 / p) - 1.0));
  }
  return {worst <= 1e-10, "worst relative deviation " + fmt(worst)};
}

Outcome manufactured() {
  const auto t0 = clk::now();
  const Grid g(1.0, 64);
  const auto part = build_partition(g);
  bool ok = true;
  std::ostringstream os;
  for (const auto& prm : {unit, mixed}) {
    const auto m = manufactured_solution(g, prm, 42, 0.05, 6);
    const auto [Us, rs] = picard_solve(m.F, prm, options(SolveMode::series));
    const auto [Uf, rf] = picard_solve(m.F, prm, options(SolveMode::fixed_point));
    const double ef = state_rel(part, Uf, m.exact), es = state_rel(part, Us, m.exact);
    const double sf = state_rel(part, Us, Uf);
    const double vr = v_field_diagnostics(Uf, m.F, prm).relative;
    ok = ok && rf.converged && rs.converged && rf.iterates <= 50 && ef <= 1e-8 && es <= 1e-8 && sf <= 1e-8 &&
         vr <= 1e-8;
    os << "nu=" << prm.nu << ": err " << fmt(std::max(ef, es)) << " in " << rf.iterates << " it, modes "
       << fmt(sf) << ", v " << fmt(vr) << "; ";
  }
  const double t = seconds_since(t0);
  os << fmt(t) << " s";
  return {ok && t < 300, os.str()};
}

Outcome series() {
  const Grid g(1.0, 32);
  const auto m = manufactured_solution(g, mixed, 42, 0.05, 6);
  bool ok = true;
  std::vector<double> ratio;
  double worst_fit = 0;  // fit residual over its allowance
  for (double a : {1.0, 0.5, 0.25}) {
    const auto rep = picard_solve(a * m.F, mixed, options(SolveMode::series, 0.0, 10)).second;
    const auto sh = series_shape(rep.series_norms);
    ok = ok && rep.series_norms.size() == 10 && sh.pass;
    worst_fit = std::max(worst_fit, sh.fit_residual / (0.05 * std::abs(sh.slope) * (rep.series_norms.size() - 1)));
    ratio.push_back(rep.series_norms[1] / rep.series_norms[0]);
  }
  double dev = 0;
  for (std::size_t i = 1; i < ratio.size(); ++i) dev = std::max(dev, std::abs(ratio[i] / ratio[i - 1] - 0.5));
  ok = ok && dev <= 1e-6;
  return {ok, "fit residual " + fmt(worst_fit) + " of allowance, A2/A1 halving deviation " + fmt(dev)};
}

Outcome friedrichs() {
  const Grid g(1.0, 64);
  std::mt19937_64 rng(5);
  const auto f = random_vector_field(g, rng, 1.0, 6, true);
  const auto gg = random_vector_field(g, rng, 1.0, 6, true);
  const double amp = 1e-3;
  const auto cal = calibrate_delta(make_forces(f, gg), unit, {1.0, 2.0, inf}, 3, 60, 1e-8);
  const auto U = picard_solve(make_forces(amp * f, amp * gg), unit, options(SolveMode::fixed_point)).first;
  bool ok = cal.threshold_amplitude > 0;
  double worst_bound = 0, worst_agree = 0;
  for (double n : {4.0, 8.0, 16.0, 32.0}) {
    const auto [x, rep] = friedrichs_solve(amp * f, amp * gg, unit, n);
    for (std::size_t i = 0; i < rep.uniform_bound.size(); ++i) {
      const double q = rep.uniform_bound[i].second / (2 * cal.delta[i].second);
      worst_bound = std::max(worst_bound, q);
      ok = ok && cal.delta[i].first == rep.uniform_bound[i].first && q < 1.0;
    }
    const bool covers = rel_diff(spectral_cutoff(f, n), f) == 0.0 && rel_diff(spectral_cutoff(gg, n), gg) == 0.0;
    if (covers) {
      const double d = l2_norm(FieldPair{x.u - U.u, x.B - U.B}) / l2_norm(FieldPair{U.u, U.B});
      worst_agree = std::max(worst_agree, d);
      ok = ok && d <= 1e-6;
    }
  }
  return {ok, "max bound/(2 delta) " + fmt(worst_bound) + ", Picard gap " + fmt(worst_agree)};
}

Outcome audits() {
  const auto t0 = clk::now();
  struct Item {
    std::string name;
    std::function<RatioStats(const EnsembleSpec&)> run;
  };
  const std::vector<Item> items = {
      {"pl_2", [](const EnsembleSpec& e) { return audit_product_law(e, ProductLaw::pl_2, {2.0, 2.0, 2.0, 2.0}); }},
      {"pl_1", [](const EnsembleSpec& e) { return audit_product_law(e, ProductLaw::pl_1, {2.0, 2.0, 4.0, 4.0}); }},
      {"pl_minus_half",
       [](const EnsembleSpec& e) { return audit_product_law(e, ProductLaw::pl_minus_half, {2.0, 2.0, 2.0, 2.0}); }},
      {"pl_minus_3quarters",
       [](const EnsembleSpec& e) { return audit_product_law(e, ProductLaw::pl_minus_3quarters, {2.0, 2.0, 2.0, 2.0}); }},
      {"ns_bilinear",
       [](const EnsembleSpec& e) { return audit_product_law(e, ProductLaw::ns_bilinear, {3.0, 2.0, 2.0, 2.0}); }},
      {"commutator(-1/2)", [](const EnsembleSpec& e) { return audit_commutator(e, -0.5, 2.0, inf, 4.0); }},
      {"commutator(-1)", [](const EnsembleSpec& e) { return audit_commutator(e, -1.0, 2.0, inf, 2.0); }},
  };
  bool ok = true;
  std::ostringstream os;
  for (const auto& it : items) {
    const auto a = it.run(EnsembleSpec{Grid(1.0, 32), 100, 7});
    const auto b = it.run(EnsembleSpec{Grid(1.0, 64), 100, 7});
    const bool good = a.n_samples >= 100 && b.n_samples >= 100 && std::isfinite(a.max_ratio) &&
                      std::isfinite(b.max_ratio) && b.max_ratio <= 2 * a.max_ratio && a.max_ratio <= 2 * b.max_ratio;
    ok = ok && good;
    os << it.name << " " << fmt(a.max_ratio) << "/" << fmt(b.max_ratio) << (good ? "" : " (!)") << "; ";
  }
  const double t = seconds_since(t0);
  os << fmt(t) << " s";
  return {ok && t < 600, os.str()};
}

Outcome desk_sweep() {
  const auto t0 = clk::now();
  InflationConfig base;
  base.epsilon = 1.0;
  base.block_rule = BlockRule::relaxed_all_k;
  base.N = 256;
  SweepOptions opt;
  opt.solve_picard = false;
  const auto rows = inflation_sweep(base, {5, 6, 7}, opt);
  bool a = true, b = true, c = true, d = true, e = true;
  double min_mass = 1, max_div = 0, worst_lp = 0, min_g = inf;
  std::ostringstream lp;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.feasible) {
      a = b = c = d = e = false;
      continue;
    }
    min_mass = std::min(min_mass, r.mass_fraction);
    max_div = std::max(max_div, r.div_g);
    a = a && r.mass_fraction >= 0.9999;
    b = b && r.div_g <= 1e-12;
    if (i > 0) c = c && r.norm_g_B031 < rows[i - 1].norm_g_B031;
    const double q = r.seminorm_Gn / rows[0].seminorm_Gn;
    min_g = std::min(min_g, q);
    d = d && q >= 0.5;
    for (const auto& cmp : r.lp_b) {
      const double rd = cmp.rel_diff();
      worst_lp = std::max(worst_lp, rd);
      if (!(rd <= 0.05)) {
        e = false;
        lp << " n=" << r.n << ",p=" << cmp.p << ":" << fmt(rd);
      }
    }
  }
  const double t = seconds_since(t0);
  std::printf("  7a localization %s (min mass %.7f)\n", a ? "PASS" : "FAIL", min_mass);
  std::printf("  7b divergence %s (max %s)\n", b ? "PASS" : "FAIL", fmt(max_div).c_str());
  std::printf("  7c B031 decreasing %s\n", c ? "PASS" : "FAIL");
  std::printf("  7d G_n seminorm %s (min ratio to n=5 %s)\n", d ? "PASS" : "FAIL", fmt(min_g).c_str());
  std::printf("  7e L^p agreement %s (worst %s%s)\n", e ? "PASS" : "FAIL", fmt(worst_lp).c_str(),
              e ? "" : (", over 5%:" + lp.str()).c_str());
  return {a && b && c && d && e && t < 1200, "rows 5,6,7 at 256^3, " + fmt(t) + " s"};
}

Outcome equivariance() {
  const Grid g(1.0, 32);
  const auto m = manufactured_solution(g, mixed, 42, 0.05, 6);
  const auto U = picard_solve(m.F, mixed, options(SolveMode::fixed_point)).first;
  const auto V = picard_solve(scale_forces(m.F, 2.0), mixed, options(SolveMode::fixed_point)).first;
  const auto SU = scale_state(U, 2.0);
  const double d = state_rel(build_partition(SU.grid()), V, SU);
  return {d <= 1e-8, "relative gap " + fmt(d)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 identity suite", identities},
      {"2 dyadic scaling", dyadic_scaling},
      {"3 manufactured recovery", manufactured},
      {"4 Picard series shape", series},
      {"5 Friedrichs uniform bound", friedrichs},
      {"6 estimate audits", audits},
      {"7 inflation desk sweep", desk_sweep},
      {"8 scaling equivariance", equivariance},
  };
  int passed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("error: ") + ex.what()};
    }
    passed += o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", passed, criteria.size());
  return 0;
}
