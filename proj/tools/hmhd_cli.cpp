#include <sys/resource.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <hmhd/hmhd.hpp>
#include <iostream>
#include <json.hpp>
#include <optional>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hmhd;

namespace {

constexpr const char* kVersion = "hmhd 1.0.0";
constexpr int kSchema = 1;

enum Exit { ok = 0, config_error = 1, numerical = 2 };

struct NumericalFailure : std::runtime_error {
  json detail;
  NumericalFailure(const std::string& w, json d) : std::runtime_error(w), detail(std::move(d)) {}
};

struct Run {
  std::string sub;
  fs::path out = "out";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  json config;  // resolved, defaults filled in
  json grids = json::array();
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("schema") && j["schema"] != kSchema)
    throw ConfigError("unsupported config schema " + j["schema"].dump());
  j["schema"] = kSchema;
  return j;
}

// Reads key with a default and records the value used.
template <class T>
T take(json& j, const char* key, const T& def) {
  if (!j.contains(key)) {
    j[key] = def;
    return def;
  }
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

json& section(json& j, const char* key) {
  if (!j.contains(key)) j[key] = json::object();
  if (!j[key].is_object()) throw ConfigError(std::string("config key '") + key + "' must be an object");
  return j[key];
}

double json_num(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return inf;
    throw ConfigError("expected a number or \"inf\", got \"" + s + "\"");
  }
  if (!v.is_number()) throw ConfigError("expected a number, got " + v.dump());
  return v.get<double>();
}

json num_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

Grid read_grid(Run& run, json& cfg) {
  json& g = section(cfg, "grid");
  const int N = take(g, "N", 32);
  const double L = take(g, "L", 1.0);
  const DealiasRule rule = parse_dealias(take<std::string>(g, "dealias", "two_thirds"));
  const Grid grid(L, N, rule);
  run.grids.push_back({{"N", N}, {"L", L}, {"dealias", to_string(rule)}});
  return grid;
}

PhysicalParams read_params(json& cfg) {
  json& p = section(cfg, "params");
  PhysicalParams prm{take(p, "mu", 1.0), take(p, "nu", 1.0), take(p, "hall", 1.0)};
  prm.validate();
  return prm;
}

std::uint64_t seed_of(Run& run, json& j, std::uint64_t def) {
  if (run.seed) {
    j["seed"] = *run.seed;
    return *run.seed;
  }
  return take<std::uint64_t>(j, "seed", def);
}

SpectralVectorField read_vector_file(const std::string& path, const Grid& g) {
  auto comps = read_fields(path);
  if (comps.size() != 3) throw ConfigError(path + " does not hold a vector field");
  if (!(comps[0].grid == g)) throw ConfigError(path + " was written on a different grid");
  return {std::move(comps[0]), std::move(comps[1]), std::move(comps[2])};
}

struct Forces {
  ForceTriple F;
  std::optional<HallState> exact;
};

Forces read_forces(Run& run, json& cfg, const Grid& g, const PhysicalParams& prm) {
  json& f = section(cfg, "forces");
  const std::string kind = take<std::string>(f, "kind", "zero");
  const double scale = take(f, "scale", 1.0);
  Forces out;
  if (kind == "zero") {
    out.F = make_forces(SpectralVectorField(g), SpectralVectorField(g));
  } else if (kind == "manufactured") {
    const auto m = manufactured_solution(g, prm, seed_of(run, f, 42), take(f, "amplitude", 0.05),
                                         take(f, "band", 6), take(f, "beta", 1.5));
    out.F = m.F;
    if (scale == 1.0) out.exact = m.exact;
  } else if (kind == "random") {
    std::mt19937_64 rng(seed_of(run, f, 1));
    const int band = take(f, "band", 6);
    const double beta = take(f, "beta", 1.0), amp = take(f, "amplitude", 1e-3);
    if (band > dealias::input_band(g)) throw ConfigError("force band exceeds the dealias band");
    const auto ff = random_vector_field(g, rng, beta, band, true);
    const auto gg = random_vector_field(g, rng, beta, band, true);
    out.F = make_forces(amp * ff, amp * gg);
  } else if (kind == "files") {
    const auto ff = read_vector_file(take<std::string>(f, "f", ""), g);
    const auto gg = read_vector_file(take<std::string>(f, "g", ""), g);
    if (f.contains("curl_g")) {
      out.F = make_forces(ff, gg, read_vector_file(f["curl_g"].get<std::string>(), g));
    } else {
      out.F = make_forces(ff, gg);
    }
  } else {
    throw ConfigError("unknown forces kind '" + kind + "'");
  }
  if (scale != 1.0) out.F = scale * out.F;
  return out;
}

json report_json(const SolveReport& r) {
  json j;
  j["mode"] = r.mode;
  j["iterates"] = r.iterates;
  j["residuals"] = r.residuals;
  j["series_norms"] = r.series_norms;
  j["converged"] = r.converged;
  j["residual_monotone"] = r.residual_monotone;
  j["aliasing"] = r.aliasing;
  j["consistency"] = r.consistency;
  j["max_divergence"] = r.max_divergence;
  j["warnings"] = r.warnings;
  j["final_norms"] = json::array();
  for (const auto& n : r.final_norms)
    j["final_norms"].push_back({{"s", n.index.s}, {"p", num_json(n.index.p)}, {"r", num_json(n.index.r)},
                                {"u", n.u}, {"B", n.B}, {"J", n.J}});
  return j;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  os << j.dump(2) << '\n';
}

// --- solve -------------------------------------------------------------------------------

int cmd_solve(Run& run) {
  json& cfg = run.config;
  const Grid g = read_grid(run, cfg);
  const PhysicalParams prm = read_params(cfg);
  const Forces F = read_forces(run, cfg, g, prm);
  json& s = section(cfg, "solver");
  SolveOptions opt;
  opt.mode = parse_mode(take<std::string>(s, "mode", "fixed_point"));
  opt.max_m = take(s, "max_iter", 50);
  opt.tol = take(s, "tol", 1e-12);

  json rep;
  std::pair<HallState, SolveReport> res;
  try {
    res = picard_solve(F.F, prm, opt);
  } catch (const NonConvergence& e) {
    throw NumericalFailure(e.what(), {{"solve", report_json(e.report)}});
  }
  const auto& [U, sr] = res;
  rep["solve"] = report_json(sr);
  const ResidualReport rr = residual(U, F.F, prm);
  rep["residual"] = {{"solved_relative", rr.solved_relative},
                     {"momentum_relative", rr.momentum_relative},
                     {"induction_relative", rr.induction_relative},
                     {"divergence_u", rr.divergence_u},
                     {"divergence_B", rr.divergence_B}};
  const VFieldReport vr = v_field_diagnostics(U, F.F, prm);
  rep["v_equation"] = {{"residual", vr.residual}, {"relative", vr.relative}};
  if (F.exact) {
    const DyadicPartition part = build_partition(g);
    double e = 0, d = 0;
    for (int i = 0; i < 3; ++i) {
      e += std::pow(besov_norm(part, U[i] - (*F.exact)[i], {0.5, 2.0, 2.0}), 2);
      d += std::pow(besov_norm(part, (*F.exact)[i], {0.5, 2.0, 2.0}), 2);
    }
    rep["recovery_error"] = d > 0 ? std::sqrt(e / d) : std::sqrt(e);
  }
  write_field(run.file("u.bin").string(), U.u);
  write_field(run.file("B.bin").string(), U.B);
  write_field(run.file("J.bin").string(), U.J);
  write_json(run.file("report.json"), rep);
  if (!sr.converged) throw NumericalFailure("no convergence within max_iter", rep);
  return ok;
}

// --- friedrichs --------------------------------------------------------------------------

int cmd_friedrichs(Run& run) {
  json& cfg = run.config;
  const Grid g = read_grid(run, cfg);
  const PhysicalParams prm = read_params(cfg);
  const Forces F = read_forces(run, cfg, g, prm);
  const auto cutoffs = take(cfg, "cutoffs", std::vector<double>{4, 8, 16, 32});
  json& o = section(cfg, "options");
  FriedrichsOptions opt;
  opt.tol = take(o, "tol", 1e-12);
  opt.max_iter = take(o, "max_iter", 200);
  opt.delta_r = json_num(o.contains("delta_r") ? o["delta_r"] : (o["delta_r"] = 2.0));
  opt.bound_r.clear();
  if (!o.contains("bound_r")) o["bound_r"] = {1.0, 2.0, "inf"};
  for (const auto& r : o["bound_r"]) opt.bound_r.push_back(json_num(r));
  if (o.contains("delta") && !o["delta"].is_null()) opt.delta = json_num(o["delta"]);

  std::optional<DeltaCalibration> cal;
  if (cfg.contains("calibrate") && !cfg["calibrate"].is_null()) {
    json& c = section(cfg, "calibrate");
    cal = calibrate_delta(F.F, prm, opt.bound_r, take(c, "steps", 6), take(c, "max_iter", 60), take(c, "tol", 1e-8));
  }
  std::ofstream os(run.file("friedrichs.csv"));
  CsvWriter csv(os, {"n", "r", "uniform_bound", "delta", "contraction", "K_lower", "a_norm", "data_norm",
                     "iterations", "converged", "cutoff_defect"});
  json rep = json::array();
  for (double n : cutoffs) {
    FriedrichsReport fr;
    try {
      fr = friedrichs_solve(F.F.f, F.F.g, prm, n, opt).second;
    } catch (const PreconditionError& e) {
      throw NumericalFailure(e.what(), {{"cutoff", n}});
    } catch (const NonConvergence& e) {
      throw NumericalFailure(e.what(), {{"cutoff", n}, {"solve", report_json(e.report)}});
    }
    for (std::size_t i = 0; i < fr.uniform_bound.size(); ++i) {
      const double delta = cal ? cal->delta[i].second : NAN;
      csv.row({CsvWriter::num(n), CsvWriter::num(fr.uniform_bound[i].first), CsvWriter::num(fr.uniform_bound[i].second),
               CsvWriter::num(delta), CsvWriter::num(fr.contraction), CsvWriter::num(fr.K_lower),
               CsvWriter::num(fr.a_norm), CsvWriter::num(fr.data_norm), CsvWriter::num(fr.solve.iterates),
               CsvWriter::num(fr.solve.converged), CsvWriter::num(fr.cutoff_defect)});
    }
    rep.push_back({{"cutoff", n}, {"contraction", fr.contraction}, {"K_lower", fr.K_lower},
                   {"solve", report_json(fr.solve)}});
  }
  json out = {{"cutoffs", rep}};
  if (cal) {
    out["calibration"] = {{"threshold_amplitude", cal->threshold_amplitude}, {"solves", cal->solves}};
    for (const auto& [r, d] : cal->delta) out["calibration"]["delta"].push_back({num_json(r), d});
  }
  write_json(run.file("report.json"), out);
  return ok;
}

// --- audit -------------------------------------------------------------------------------

int cmd_audit(Run& run) {
  json& cfg = run.config;
  const auto sizes = take(cfg, "grid_sizes", std::vector<int>{32});
  const double L = take(cfg, "L", 1.0);
  const std::uint64_t seed = seed_of(run, cfg, 1);
  bool all_pass = true;

  // validate every estimate before running anything
  std::vector<std::pair<ProductLaw, LawParams>> laws;
  for (auto& l : cfg.value("laws", json::array())) {
    LawParams lp;
    lp.p = json_num(l.value("p", json(2.0)));
    lp.r = json_num(l.value("r", json(2.0)));
    lp.r1 = json_num(l.value("r1", json(2.0)));
    lp.r2 = json_num(l.value("r2", json(2.0)));
    const ProductLaw law = parse_law(l.value("law", std::string()));
    validate_law(law, lp);
    laws.push_back({law, lp});
  }
  std::vector<std::array<double, 4>> comms;
  for (auto& c : cfg.value("commutators", json::array())) {
    const std::array<double, 4> a{json_num(c.value("s", json(0.5))), json_num(c.value("r", json(2.0))),
                                  json_num(c.value("rho1", json("inf"))), json_num(c.value("rho2", json(2.0)))};
    validate_commutator(a[0], a[1], a[2], a[3]);
    comms.push_back(a);
  }

  std::vector<Grid> grids;
  for (int N : sizes) {
    grids.emplace_back(L, N);
    run.grids.push_back({{"N", N}, {"L", L}, {"dealias", "two_thirds"}});
  }

  if (cfg.contains("identities") && !cfg["identities"].is_null()) {
    json& id = section(cfg, "identities");
    const int count = take(id, "seeds", 20);
    const std::string set = take<std::string>(id, "set", "all");
    if (set != "all" && set != "cancellation") throw ConfigError("identity set must be 'all' or 'cancellation'");
    const double tol = take(id, "tol", 1e-10);
    std::ofstream os(run.file("identities.csv"));
    CsvWriter csv(os, {"identity", "grid_N", "seed", "value", "tol", "pass"});
    for (const Grid& g : grids)
      for (int s = 0; s < count; ++s)
        for (const auto& c :
             identity_suite(g, seed + s, set == "all" ? IdentitySet::all : IdentitySet::cancellation, tol)) {
          all_pass = all_pass && c.pass();
          csv.row({c.name, CsvWriter::num(c.grid_N), std::to_string(c.seed), CsvWriter::num(c.value),
                   CsvWriter::num(c.tol), CsvWriter::num(c.pass())});
        }
  }

  if (!laws.empty() || !comms.empty()) {
    const int samples = take(cfg, "samples", 100);
    const double bmin = take(cfg, "beta_min", 0.5), bmax = take(cfg, "beta_max", 2.5);
    std::ofstream os(run.file("audit.csv"));
    CsvWriter csv(os, {"law", "s", "p", "r", "grid_N", "samples", "skipped", "max_ratio", "p95_ratio"});
    auto emit = [&](const RatioStats& st) {
      csv.row({st.law, CsvWriter::num(st.s), CsvWriter::num(st.p), CsvWriter::num(st.r), CsvWriter::num(st.grid_N),
               CsvWriter::num(st.n_samples), CsvWriter::num(st.n_skipped), CsvWriter::num(st.max_ratio),
               CsvWriter::num(st.p95_ratio)});
    };
    for (const Grid& g : grids) {
      const EnsembleSpec ens{g, samples, seed, bmin, bmax};
      for (const auto& [law, lp] : laws) emit(audit_product_law(ens, law, lp));
      for (const auto& c : comms) emit(audit_commutator(ens, c[0], c[1], c[2], c[3]));
    }
  }
  if (!all_pass) throw NumericalFailure("identity checks exceeded tolerance", json::object());
  return ok;
}

// --- inflate -----------------------------------------------------------------------------

int cmd_inflate(Run& run) {
  json& cfg = run.config;
  InflationConfig ic;
  const auto ns = take(cfg, "n", std::vector<int>{5, 6, 7});
  ic.epsilon = take(cfg, "epsilon", 1.0);
  ic.block_rule = parse_block_rule(take<std::string>(cfg, "block_rule", "relaxed_all_k"));
  ic.relaxed_gap = take(cfg, "relaxed_gap", ic.relaxed_gap);
  ic.relaxed_width = take(cfg, "relaxed_width", ic.relaxed_width);
  ic.theta_a = take(cfg, "theta_a", ic.theta_a);
  ic.N = take(cfg, "grid_N", 256);
  ic.mu = take(cfg, "mu", 1.0);
  ic.min_separation = take(cfg, "min_separation", ic.min_separation);
  ic.max_overlap = take(cfg, "max_overlap", ic.max_overlap);
  if (cfg.contains("recenter_shift") && !cfg["recenter_shift"].is_null())
    ic.recenter_shift = cfg["recenter_shift"].get<int>();
  else
    cfg["recenter_shift"] = nullptr;
  cfg["r"] = ic.r();
  if (ns.empty()) throw ConfigError("no inflation indices given");
  for (int n : ns) {
    InflationConfig c = ic;
    c.n = n;
    c.validate();
  }
  SweepOptions so;
  so.solve_picard = take(cfg, "solve_picard", true);
  so.picard_max = take(cfg, "picard_max", so.picard_max);
  so.picard_tol = take(cfg, "picard_tol", so.picard_tol);
  so.lp_exponents = take(cfg, "lp_exponents", so.lp_exponents);

  std::vector<std::string> header{"n", "epsilon", "r", "grid_N", "recenter_shift", "block_rule", "norm_g_B031",
                                  "norm_f_Bm231", "seminorm_Gn", "seminorm_Un", "feasible", "placement", "theta_a",
                                  "mass_fraction", "div_g", "norm_Gn_B03r", "picard_iterates"};
  for (double p : so.lp_exponents) {
    const std::string s = CsvWriter::num(p);
    header.push_back("lp_grid_" + s);
    header.push_back("lp_semianalytic_" + s);
    header.push_back("overlap_bound_" + s);
  }
  header.push_back("note");
  std::ofstream os(run.file("sweep.csv"));
  CsvWriter csv(os, header);
  int feasible = 0, empty_sets = 0;
  for (int n : ns) {
    InflationConfig c = ic;
    c.n = n;
    const SweepRow row = inflation_row(c, so);
    feasible += row.feasible;
    empty_sets += row.note == "empty block set";
    std::vector<std::string> cells{CsvWriter::num(row.n), CsvWriter::num(row.epsilon), CsvWriter::num(row.r),
                                   CsvWriter::num(row.grid_N), CsvWriter::num(row.recenter_shift), row.block_rule,
                                   CsvWriter::num(row.norm_g_B031), CsvWriter::num(row.norm_f_Bm231),
                                   CsvWriter::num(row.seminorm_Gn), CsvWriter::num(row.seminorm_Un),
                                   CsvWriter::num(row.feasible), row.placement, CsvWriter::num(row.theta_a),
                                   CsvWriter::num(row.mass_fraction), CsvWriter::num(row.div_g),
                                   CsvWriter::num(row.norm_G_total), CsvWriter::num(row.picard_iterates)};
    for (std::size_t i = 0; i < so.lp_exponents.size(); ++i) {
      const bool have = i < row.lp_b.size();
      cells.push_back(CsvWriter::num(have ? row.lp_b[i].grid : NAN));
      cells.push_back(CsvWriter::num(have ? row.lp_b[i].semianalytic : NAN));
      cells.push_back(CsvWriter::num(have ? row.lp_b[i].overlap_bound : NAN));
    }
    cells.push_back(row.note);
    csv.row(cells);
    os.flush();
    if (row.feasible) run.grids.push_back({{"N", row.grid_N}, {"L", std::ldexp(1.0, row.recenter_shift)}});
  }
  // overflow rows are a result; a config whose block sets are all empty is not
  if (feasible == 0 && empty_sets == int(ns.size())) throw ConfigError("every sweep row has an empty block set");
  return ok;
}

// --- lp-norm -----------------------------------------------------------------------------

int cmd_lp_norm(Run& run, const std::string& field_flag) {
  json& cfg = run.config;
  if (!field_flag.empty()) cfg["field"] = field_flag;
  const std::string path = take<std::string>(cfg, "field", "");
  if (path.empty()) throw ConfigError("lp-norm needs a field file (--field or config key 'field')");
  auto comps = read_fields(path);
  const Grid g = comps[0].grid;
  run.grids.push_back({{"N", g.N}, {"L", g.L}, {"dealias", to_string(g.rule)}});
  if (!cfg.contains("p")) cfg["p"] = {2.0};
  std::vector<const SpectralField*> ptrs;
  for (auto& c : comps) ptrs.push_back(&c);
  std::ofstream os(run.file("norms.csv"));
  CsvWriter csv(os, {"quantity", "s", "p", "r", "value"});
  json out = json::array();
  for (const auto& pj : cfg["p"]) {
    const double p = json_num(pj);
    double v;
    if (comps.size() == 3) {
      v = lp_norm(SpectralVectorField(comps[0], comps[1], comps[2]), p);
    } else if (comps.size() == 1) {
      v = lp_norm(comps[0], p);
    } else {
      throw ConfigError("L^p norms need a scalar or 3-vector field");
    }
    csv.row({"lp", "", CsvWriter::num(p), "", CsvWriter::num(v)});
    std::cout << "L^" << p << " = " << CsvWriter::num(v) << '\n';
  }
  if (cfg.contains("besov")) {
    const DyadicPartition part = build_partition(g);
    for (const auto& b : cfg["besov"]) {
      if (!b.is_array() || b.size() != 3) throw ConfigError("besov entries are [s, p, r]");
      const BesovIndex idx{json_num(b[0]), json_num(b[1]), json_num(b[2])};
      const double v = besov_norm(part, ptrs, idx);
      csv.row({"besov", CsvWriter::num(idx.s), CsvWriter::num(idx.p), CsvWriter::num(idx.r), CsvWriter::num(v)});
      std::cout << "B^{" << idx.s << "}_{" << idx.p << "," << idx.r << "} = " << CsvWriter::num(v) << '\n';
    }
  }
  return ok;
}

long peak_rss_kb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Hall-MHD and Navier-Stokes toolkit"};
  app.require_subcommand(1);
  Run run;
  std::string field;
  app.add_option("--config", run.config_path, "JSON config file");
  app.add_option("--out", run.out, "output directory")->capture_default_str();
  app.add_option("--threads", run.threads, "FFT threads")->check(CLI::PositiveNumber);
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "overrides every seed in the config");
  app.set_version_flag("--version", kVersion);
  app.add_subcommand("solve", "Picard solve of the stationary Hall-MHD system");
  app.add_subcommand("friedrichs", "spectral-cutoff scheme with uniform bounds");
  app.add_subcommand("audit", "identity suite and product-law ratio audits");
  app.add_subcommand("inflate", "norm-inflation desk sweep");
  auto* lp = app.add_subcommand("lp-norm", "norms of a field file");
  lp->add_option("--field", field, "field file");
  for (auto* s : app.get_subcommands({})) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : config_error;
  }
  run.sub = app.get_subcommands().front()->get_name();
  if (*seed_opt) run.seed = seed;

  const auto t0 = std::chrono::steady_clock::now();
  json manifest = {{"subcommand", run.sub}, {"version", kVersion}, {"config_path", run.config_path}};
  int code = ok;
  try {
    fs::create_directories(run.out);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  }
  try {
    run.config = load_config(run.config_path);
    if (run.threads > 1) fft::set_threads(run.threads);
    if (run.sub == "solve") code = cmd_solve(run);
    else if (run.sub == "friedrichs") code = cmd_friedrichs(run);
    else if (run.sub == "audit") code = cmd_audit(run);
    else if (run.sub == "inflate") code = cmd_inflate(run);
    else code = cmd_lp_norm(run, field);
  } catch (const NumericalFailure& e) {
    code = numerical;
    manifest["error"] = e.what();
    manifest["error_detail"] = e.detail;
  } catch (const NonConvergence& e) {
    code = numerical;
    manifest["error"] = e.what();
  } catch (const PreconditionError& e) {
    code = numerical;
    manifest["error"] = e.what();
  } catch (const std::exception& e) {  // ConfigError, IoError, DomainError, json errors
    code = config_error;
    manifest["error"] = e.what();
  }
  if (manifest.contains("error")) std::cerr << "error: " << manifest["error"].get<std::string>() << '\n';
  manifest["config"] = run.config;
  manifest["threads"] = run.threads;
  manifest["grids"] = run.grids;
  manifest["outputs"] = run.outputs;
  manifest["exit_code"] = code;
  manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["peak_rss_kb"] = peak_rss_kb();
  try {
    write_json(run.out / "manifest.json", manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  }
  return code;
}
