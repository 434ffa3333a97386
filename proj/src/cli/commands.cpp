#include "glpin/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "glpin/bbh.hpp"
#include "glpin/desk.hpp"
#include "glpin/field_io.hpp"
#include "glpin/kernels.hpp"

namespace fs = std::filesystem;

namespace glpin::cli {

json to_json(const Point2& p) { return json::array({p.x, p.y}); }
json to_json(const Sym2& q) { return {{"xx", q.xx}, {"xy", q.xy}, {"yy", q.yy}}; }

namespace {

json points_json(const std::vector<Point2>& v) {
  json a = json::array();
  for (const Point2& p : v) a.push_back(to_json(p));
  return a;
}

json opt_point(const std::optional<Point2>& p) { return p ? to_json(*p) : json(nullptr); }

json degrees_json(const std::vector<ClusterDegrees>& v) {
  json a = json::array();
  for (const auto& d : v) a.push_back(d);
  return a;
}

}  // namespace

json to_json(const DefectReport& r) {
  json defects = json::array();
  for (const Defect& d : r.defects)
    defects.push_back({{"center", to_json(d.center)},
                       {"radius", d.radius},
                       {"degree", d.degree},
                       {"degree_defined", d.degree_defined},
                       {"touches_boundary", d.touches_boundary},
                       {"nodes", d.nodes},
                       {"min_abs", d.min_abs},
                       {"inclusion_center", opt_point(d.inclusion_center)},
                       {"micro_coord", opt_point(d.micro_coord)}});
  json clusters = json::array();
  for (const ClusterEntry& c : r.clusters)
    clusters.push_back({{"k", c.k}, {"p", to_json(c.p)}, {"D", c.D}, {"members", c.members}, {"meso", points_json(c.meso)}});
  return {{"hex", r.hex}, {"defects", defects}, {"clusters", clusters}, {"D", r.D()}, {"total_degree", r.total_degree()}};
}

json to_json(const Comparison& c) {
  return {{"observed_d", c.observed_d},
          {"predicted_d", c.predicted_d},
          {"count_ok", c.count_ok},
          {"D_allowed", c.D_allowed},
          {"all_degree_one", c.all_degree_one},
          {"all_pinned", c.all_pinned},
          {"min_separation", c.min_separation},
          {"separation_scaled", c.separation_scaled},
          {"max_lambda_distance", c.max_lambda_distance},
          {"lambda_distance_scaled", c.lambda_distance_scaled}};
}

json to_json(const Prediction& p) {
  return {{"d", p.d}, {"d_lo", p.d_lo}, {"d_hi", p.d_hi}, {"regime", p.regime}, {"degrees", degrees_json(p.degrees)}};
}

json to_json(const CriticalLadder& l) {
  json wbar = json::object();
  for (const auto& [d, w] : l.wbar) wbar[std::to_string(d)] = w;
  json degrees = json::object();
  for (const auto& [d, D] : l.degrees) degrees[std::to_string(d)] = degrees_json(D);
  return {{"N0", l.N0}, {"M", l.M}, {"H0c1", l.H0c1}, {"Hc1", l.Hc1()}, {"KI", l.KI}, {"KII", l.KII},
          {"dstar", l.d_star}, {"Kstar", l.K_star}, {"wbar", wbar}, {"degrees", degrees}};
}

json to_json(const DecompositionReport& d) {
  return {{"F_full", d.F_full},   {"hex2_J0", d.hex2_J0},         {"F_v", d.F_v},
          {"point_terms", d.point_terms}, {"zeta_energy", d.zeta_energy}, {"rhs", d.rhs},
          {"residual", d.residual}, {"relative", d.relative}};
}

namespace {

struct Command {
  std::string config_file;
  std::string out;
  RunConfig cfg;
};

void write_json(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream o(p);
  o << j.dump(2) << "\n";
  if (!o) throw ValidationError("cannot write " + p.string());
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

json report(const RunConfig& cfg, const std::string& command) {
  return {{"command", command}, {"config_hash", cfg.hash}, {"version", toolkit_version()}};
}

fs::path out_dir(const Command& c) { return c.out.empty() ? fs::path(c.cfg.output_dir) : fs::path(c.out); }

GridPtr grid_of(const RunConfig& cfg, int n = 0) { return build_grid(cfg.domain, n > 0 ? n : cfg.resolution); }

LondonData london_of(const RunConfig& cfg, GridPtr g) {
  if (cfg.synthetic_xi0) return london_from_xi0(sample_synthetic(g, *cfg.synthetic_xi0));
  return solve_london(g);
}

LondonData london_of(const RunConfig& cfg) { return london_of(cfg, grid_of(cfg)); }

VortexConfig read_vortex_file(const std::string& file) {
  return vortices_from_json(read_json(file), file);
}

json london_json(const LondonData& L) {
  json h = json::array();
  for (const Sym2& q : L.hessians) h.push_back(to_json(q));
  return {{"lambda_set", points_json(L.lambda_set)}, {"hessians", h},   {"xi0_inf_norm", L.xi0_inf_norm},
          {"M_omega", L.M_omega},                    {"J0", L.J0},      {"synthetic", L.synthetic}};
}

json fields_json(const FieldsResult& F, const PinningSpec& ps) {
  json j = to_json(F.ladder);
  // the asymptotic ordering is only emulated at desk scale; report the sizes
  const double le = std::abs(std::log(ps.epsilon));
  j["scale_separation"] = {{"b2_ln_eps", ps.b * ps.b * le},
                           {"contrast_ln_lambda_delta", (1 - ps.b * ps.b) * std::abs(std::log(ps.lambda * ps.delta))},
                           {"lambda_quarter_ln_eps", std::pow(ps.lambda, 0.25) * le}};
  j["gamma"] = F.gamma;
  j["micro"] = {{"x0", to_json(F.micro.x0)}, {"value", F.micro.value}};
  j["xi0_inf"] = F.xi0_inf;
  j["J0"] = F.J0;
  j["crossing_1"] = F.crossing(1);
  return j;
}

// ---- subcommands ----

int cmd_london(const Command& c) {
  const GridPtr g = grid_of(c.cfg);
  const LondonData L = london_of(c.cfg, g);
  const fs::path o = out_dir(c);
  fs::create_directories(o);
  write_field(o / "xi0", L.xi0);
  write_field(o / "h0", L.h0);
  json j = report(c.cfg, "london");
  j.update(london_json(L));
  if (!L.synthetic) j["identity_residual"] = london_identity_residual(L);
  write_json(o / "london.json", j);
  return 0;
}

int cmd_pinning(const Command& c) {
  const GridPtr g = grid_of(c.cfg);
  const PinningField pin = build_pinning_term(c.cfg.pinning, g);
  LMReport lm;
  const ScalarField U = solve_lassoued_mironescu(pin, c.cfg.pinning.epsilon, &lm);
  const fs::path o = out_dir(c);
  fs::create_directories(o);
  write_field(o / "a", pin.a);
  write_field(o / "U", U);
  double umin = 1.0;
  for (int k = 0; k < g->size(); ++k)
    if (g->node_w[k] > 0.0) umin = std::min(umin, U.values[k]);
  json j = report(c.cfg, "pinning");
  j["inclusions"] = pin.inclusion_centers.size();
  j["U_min"] = umin;
  ComplexField u(g);
  for (int k = 0; k < g->size(); ++k) u.values[k] = U.values[k];
  j["E_U"] = energy_E(u, pin.a, c.cfg.pinning.epsilon);
  j["lm"] = {{"residual", lm.residual}, {"flow_steps", lm.flow_steps}, {"newton_steps", lm.newton_steps}};
  write_json(o / "pinning.json", j);
  return 0;
}

void emit(const Command& c, const std::string& name, const json& j) {
  std::cout << j.dump(2) << "\n";
  if (!c.out.empty()) write_json(fs::path(c.out) / (name + ".json"), j);
}

int cmd_renorm_macro(const Command& c, const std::string& vortex_file) {
  const VortexConfig v = vortex_file.empty() ? c.cfg.seed_vortices : read_vortex_file(vortex_file);
  if (v.points.empty()) throw ValidationError("renorm-macro: no vortices (use --seed-vortices or seed_vortices)");
  const GridPtr g = grid_of(c.cfg);
  v.validate(*g);
  json j = report(c.cfg, "renorm-macro");
  j["value"] = w_macro(v, g);
  j["minimizer"] = vortices_to_json(v);
  j["diagnostics"] = {{"resolution", c.cfg.resolution}, {"h", g->h}};
  emit(c, "renorm-macro", j);
  return 0;
}

int cmd_renorm_meso(const Command& c, int D, const std::vector<double>& q, int k) {
  if (D < 1) throw ValidationError("renorm-meso: --degree must be >= 1");
  Sym2 Q;
  if (!q.empty()) {
    if (q.size() != 3) throw ValidationError("renorm-meso: --q takes xx xy yy");
    Q = {q[0], q[1], q[2]};
  } else {
    const LondonData L = london_of(c.cfg);
    if (k < 0 || k >= static_cast<int>(L.hessians.size())) throw ValidationError("renorm-meso: --point out of range");
    Q = L.hessians[k];
  }
  if (!(Q.xx > 0.0) || !(Q.det() > 0.0)) throw ValidationError("renorm-meso: Q must be positive definite");
  const MesoResult m = minimize_w_meso(D, Q, c.cfg.fields.meso_multistart, c.cfg.seed);
  json j = report(c.cfg, "renorm-meso");
  j["value"] = m.value;
  j["minimizer"] = points_json(m.points);
  j["diagnostics"] = {{"Q", to_json(Q)}, {"grad_norm", m.grad_norm}, {"iterations", m.iterations}, {"converged", m.converged}};
  emit(c, "renorm-meso", j);
  return 0;
}

int cmd_renorm_micro(const Command& c, const std::vector<double>& x0) {
  json j = report(c.cfg, "renorm-micro");
  const MicroOptions& mo = c.cfg.fields.micro;
  if (!x0.empty()) {
    if (x0.size() != 2) throw ValidationError("renorm-micro: --x0 takes x y");
    const Point2 p{x0[0], x0[1]};
    if (!c.cfg.pinning.omega.contains(p)) throw ValidationError("renorm-micro: x0 must lie in omega");
    const MicroResult r = w_micro_detail(p, c.cfg.pinning, mo);
    j["value"] = r.value;
    j["minimizer"] = nullptr;
    j["diagnostics"] = {{"x0", to_json(p)}, {"coarse", r.coarse}, {"fine", r.fine}, {"cg_iterations", r.cg_iterations}};
  } else {
    const MicroMinimum m = minimize_w_micro(c.cfg.pinning, mo, c.cfg.fields.micro_search);
    json probes = json::array();
    for (const auto& [p, v] : m.probes) probes.push_back({{"x0", to_json(p)}, {"value", v}});
    j["value"] = m.value;
    j["minimizer"] = to_json(m.x0);
    j["diagnostics"] = {{"search_step", m.search_step}, {"probes", probes}};
  }
  emit(c, "renorm-micro", j);
  return 0;
}

int cmd_gamma(const Command& c) {
  const BbhGamma b = bbh_gamma(c.cfg.fields.bbh_step);
  json j = report(c.cfg, "gamma-bbh");
  j["value"] = b.gamma;
  j["minimizer"] = nullptr;
  j["diagnostics"] = {{"extrapolation_error", b.error}, {"radii", b.radii}, {"remainders", b.remainders}};
  emit(c, "gamma-bbh", j);
  return 0;
}

FieldsResult fields_of(const RunConfig& cfg) {
  return compute_fields(london_of(cfg), cfg.pinning, cfg.fields);
}

int cmd_fields(const Command& c) {
  json j = report(c.cfg, "fields");
  j.update(fields_json(fields_of(c.cfg), c.cfg.pinning));
  write_json(out_dir(c) / "ladder.json", j);
  return 0;
}

int cmd_predict(const Command& c, double hex) {
  if (!(hex > 0.0)) throw ValidationError("predict: --hex must be positive");
  const Prediction p = predict(hex, fields_of(c.cfg).ladder, c.cfg.window);
  std::cout << json{{"d", p.d}, {"degrees", degrees_json(p.degrees)}, {"regime", p.regime}}.dump() << "\n";
  return 0;
}

void write_trace(const fs::path& p, const MinimizeReport& r) {
  std::ofstream o(p);
  o << "sweep,energy,min_abs_v\n";
  char buf[96];
  for (const TracePoint& t : r.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.sweep, t.energy, t.min_abs_v);
    o << buf;
  }
}

json minimize_json(const MinimizeReport& r) {
  return {{"sweeps", r.sweeps}, {"converged", r.converged}, {"stalled", r.stalled}, {"energy", r.energy},
          {"max_abs_v_before_clip", r.max_abs_v_before_clip}};
}

json energy_json(const GLEnergy& e) {
  return {{"kinetic", e.kinetic}, {"potential", e.potential}, {"field", e.field}, {"total", e.total()}};
}

void write_state(const fs::path& o, const GLState& s) {
  write_field(o / "v", s.v);
  write_field(o / "A", s.A);
  write_field(o / "U", s.U);
}

int cmd_simulate(const Command& c) {
  const RunConfig& cfg = c.cfg;
  if (!cfg.hex) throw ValidationError("simulate: no hex (config \"hex\" or --hex)");
  const double hex = *cfg.hex;
  const bool two = cfg.coarse_resolution > 0;
  const DeskLevel fine = prepare_level(cfg.domain, cfg.resolution, cfg.pinning);
  for (std::size_t i = 0; i < cfg.seed_vortices.points.size(); ++i)
    if (cfg.seed_vortices.degrees[i] != 1) throw ValidationError("simulate: seed vortices must have degree 1");
  GLState st;
  MinimizeReport rep;
  if (two) {
    const DeskLevel coarse = prepare_level(cfg.domain, cfg.coarse_resolution, cfg.pinning);
    st = build_test_configuration(cfg.seed_vortices, coarse.london, coarse.U, cfg.pinning.epsilon, hex, &coarse.xi0_stream);
    st = minimize(st, cfg.minimize, &rep);
    st = prolong(st, coarse, fine);
  } else {
    st = build_test_configuration(cfg.seed_vortices, fine.london, fine.U, cfg.pinning.epsilon, hex, &fine.xi0_stream);
  }
  const double e0 = energy_full(st).total();
  st = minimize(st, cfg.minimize, &rep);
  const fs::path o = out_dir(c);
  fs::create_directories(o);
  write_state(o, st);
  write_trace(o / "trace.csv", rep);
  json j = report(cfg, "simulate");
  j["hex"] = hex;
  j["epsilon"] = cfg.pinning.epsilon;
  j["resolution"] = cfg.resolution;
  j["coarse_resolution"] = cfg.coarse_resolution;
  j["seed"] = cfg.seed;
  j["seed_vortices"] = vortices_to_json(cfg.seed_vortices);
  j["initial_energy"] = e0;
  j["energy"] = energy_json(energy_full(st));
  j["minimize"] = minimize_json(rep);
  j["min_abs_v"] = min_abs_v(st.v);
  write_json(o / "run.json", j);
  return 0;
}

struct LoadedRun {
  json run;
  GLState state;
};

LoadedRun load_run(const RunConfig& cfg, const fs::path& dir) {
  LoadedRun r;
  r.run = read_json(dir / "run.json");
  if (!r.run.contains("hex") || !r.run["hex"].is_number()) throw ValidationError((dir / "run.json").string() + ": no hex");
  const int n = r.run.value("resolution", cfg.resolution);
  const GridPtr g = grid_of(cfg, n);
  r.state.v = read_complex_field(dir / "v", g);
  r.state.A = read_edge_field(dir / "A", g);
  r.state.U = read_scalar_field(dir / "U", g);
  r.state.hex = r.run["hex"].get<double>();
  r.state.epsilon = r.run.value("epsilon", cfg.pinning.epsilon);
  return r;
}

int cmd_analyze(const Command& c, const std::string& run_dir, bool with_prediction) {
  const fs::path dir = run_dir.empty() ? out_dir(c) : fs::path(run_dir);
  const LoadedRun lr = load_run(c.cfg, dir);
  const GridPtr g = lr.state.grid();
  PinningSpec ps = c.cfg.pinning;
  ps.epsilon = lr.state.epsilon;
  const PinningField pin = build_pinning_term(ps, g);
  const LondonData L = london_of(c.cfg, g);
  const DefectReport rep = cluster_report(detect_defects(lr.state.v, 0.5 * ps.b), L, lr.state.hex, &pin);
  json j = report(c.cfg, "analyze");
  j.update(to_json(rep));
  write_json(dir / "report.json", j);
  if (with_prediction) {
    const Prediction p = predict(lr.state.hex, fields_of(c.cfg).ladder, c.cfg.window);
    json k = report(c.cfg, "analyze");
    k["prediction"] = to_json(p);
    k["comparison"] = to_json(compare(rep, p));
    write_json(dir / "compare.json", k);
  }
  return 0;
}

int cmd_decomposition(const Command& c, const std::string& run_dir) {
  const fs::path dir = run_dir.empty() ? out_dir(c) : fs::path(run_dir);
  const LoadedRun lr = load_run(c.cfg, dir);
  const GridPtr g = lr.state.grid();
  const PinningSpec& ps = c.cfg.pinning;
  VortexConfig vc;
  for (const Defect& d : detect_defects(lr.state.v, 0.5 * ps.b))
    if (d.degree_defined && d.degree != 0 && !d.touches_boundary) {
      vc.points.push_back(d.center);
      vc.degrees.push_back(d.degree);
    }
  const LondonData L = solve_london(g);
  const ScalarField xi0 = london_stream(g);
  const DecompositionReport d = decomposition_check(lr.state, vc, L, &xi0);
  json j = report(c.cfg, "check-decomposition");
  j["hex"] = lr.state.hex;
  j["vortices"] = vortices_to_json(vc);
  j.update(to_json(d));
  write_json(dir / "decomposition.json", j);
  return 0;
}

int cmd_sweep(const Command& c) {
  const RunConfig& cfg = c.cfg;
  if (!cfg.sweep) throw ValidationError("sweep: config has no \"sweep\"");
  if (cfg.synthetic_xi0) throw ValidationError("sweep: synthetic_xi0 is not supported for simulations");
  DeskOptions opt;
  opt.domain = cfg.domain;
  opt.pinning = cfg.pinning;
  opt.coarse = cfg.coarse_resolution > 0 ? cfg.coarse_resolution : cfg.resolution;
  opt.fine = cfg.coarse_resolution > 0 ? cfg.resolution : 0;
  opt.minimize = cfg.minimize;
  opt.fields = cfg.fields;
  opt.window = cfg.window;
  const Desk desk = prepare_desk(opt);
  std::vector<double> hexes = cfg.sweep->values();
  const double scale = cfg.sweep->relative ? desk.fields.crossing(1) : 1.0;
  for (double& h : hexes) h *= scale;

  const fs::path o = out_dir(c);
  fs::create_directories(o);
  json f = report(cfg, "sweep");
  f.update(fields_json(desk.fields, cfg.pinning));
  write_json(o / "ladder.json", f);

  const int n = static_cast<int>(hexes.size());
  std::vector<std::string> rows(n);
  std::string failure;
  // independent runs, one directory each
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const DeskRun r = run_desk_point(desk, hexes[i]);
      char name[32];
      std::snprintf(name, sizeof name, "run_%03d", i);
      const fs::path d = o / name;
      fs::create_directories(d);
      write_state(d, r.state);
      write_trace(d / "trace.csv", r.report);
      json j = report(cfg, "sweep");
      j["hex"] = r.hex;
      j["epsilon"] = cfg.pinning.epsilon;
      j["resolution"] = cfg.resolution;
      j["prediction"] = to_json(r.prediction);
      json seeds = json::array();
      for (const SeedOutcome& s : r.seeds)
        seeds.push_back({{"label", s.label}, {"seed_degree", s.seed_degree}, {"energy", s.energy},
                         {"sweeps", s.sweeps}, {"converged", s.converged}});
      j["seeds"] = seeds;
      j["chosen"] = r.seeds[r.chosen].label;
      j["energy"] = energy_json(energy_full(r.state));
      j["minimize"] = minimize_json(r.report);
      j["min_abs_v"] = r.min_abs_v;
      write_json(d / "run.json", j);
      json rj = report(cfg, "sweep");
      rj.update(to_json(r.defects));
      write_json(d / "report.json", rj);
      json cj = report(cfg, "sweep");
      cj["prediction"] = to_json(r.prediction);
      cj["comparison"] = to_json(r.comparison);
      write_json(d / "compare.json", cj);
      char row[160];
      std::snprintf(row, sizeof row, "%.17g,%d,%d,%.17g,%.17g\n", r.hex, r.comparison.observed_d, r.prediction.d,
                    r.energy, r.min_abs_v);
      rows[i] = row;
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw SolverError("sweep: " + failure);
  std::ofstream csv(o / "sweep.csv");
  csv << "hex,d_observed,d_predicted,energy,min_abs_v\n";
  for (const auto& r : rows) csv << r;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> copy = args;
  for (auto& s : copy) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  kernels::thread_count();  // picks up GLPIN_THREADS
  CLI::App app{"glpin: pinned Ginzburg-Landau vortex toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", toolkit_version());

  Command c;
  double hex = 0.0, epsilon = 0.0;
  int max_sweeps = 0, degree = 2, point = 0;
  std::string vortex_file, run_dir;
  std::vector<double> q, x0;
  bool no_compare = false;

  auto common = [&](CLI::App* s, bool needs_config = true) {
    auto* o = s->add_option("--config", c.config_file, "run configuration (JSON)");
    if (needs_config) o->check(CLI::ExistingFile);
    s->add_option("--out", c.out, "output directory (overrides output_dir)");
    return s;
  };
  auto* london = common(app.add_subcommand("london", "London solution xi0, h0 and london.json"));
  auto* pinning = common(app.add_subcommand("pinning", "pinning term a and the scalar minimiser U"));
  auto* rmacro = common(app.add_subcommand("renorm-macro", "macroscopic renormalised energy"));
  rmacro->add_option("--seed-vortices", vortex_file, "vortex file [{x, y, degree}]")->check(CLI::ExistingFile);
  auto* rmeso = common(app.add_subcommand("renorm-meso", "mesoscopic log gas minimum"));
  rmeso->add_option("--degree", degree, "number of points D");
  rmeso->add_option("--q", q, "quadratic form xx xy yy (default: London Hessian)")->expected(3);
  rmeso->add_option("--point", point, "index in the London minimum set");
  auto* rmicro = common(app.add_subcommand("renorm-micro", "microscopic renormalised energy"));
  rmicro->add_option("--x0", x0, "evaluate at x0 instead of minimising")->expected(2);
  auto* gamma = common(app.add_subcommand("gamma-bbh", "radial vortex core constant"), false);
  auto* fields = common(app.add_subcommand("fields", "critical field ladder (ladder.json)"));
  auto* pred = common(app.add_subcommand("predict", "predicted vortex number at hex"));
  pred->add_option("--hex", hex, "applied field")->required();
  auto* sim = common(app.add_subcommand("simulate", "minimise the Ginzburg-Landau energy"));
  sim->add_option("--hex", hex, "applied field");
  sim->add_option("--epsilon", epsilon, "coherence length");
  sim->add_option("--seed-vortices", vortex_file, "vortex file [{x, y, degree}]")->check(CLI::ExistingFile);
  sim->add_option("--max-sweeps", max_sweeps, "minimiser sweep cap");
  auto* analyze = common(app.add_subcommand("analyze", "defects of a simulate output (report.json, compare.json)"));
  analyze->add_option("--run", run_dir, "simulate output directory (default: --out)");
  analyze->add_flag("--no-compare", no_compare, "skip the prediction and compare.json");
  auto* decomp = common(app.add_subcommand("check-decomposition", "energy splitting check on a simulate output"));
  decomp->add_option("--run", run_dir, "simulate output directory (default: --out)");
  auto* sweep = common(app.add_subcommand("sweep", "hex sweep against the predicted ladder (sweep.csv)"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c.config_file.empty()) {
      if (!gamma->parsed()) throw ValidationError("--config is required");
      c.cfg = parse_config("{}", "defaults");
    } else {
      c.cfg = load_config(c.config_file);
    }
    json src = c.cfg.source;
    bool edited = false;
    if (sim->parsed()) {
      if (sim->count("--hex")) src["hex"] = hex, edited = true;
      if (sim->count("--epsilon")) src["pinning"]["epsilon"] = epsilon, edited = true;
      if (sim->count("--max-sweeps")) src["minimize"]["max_sweeps"] = max_sweeps, edited = true;
      if (!vortex_file.empty()) src["seed_vortices"] = vortices_to_json(read_vortex_file(vortex_file)), edited = true;
    }
    if (edited) c.cfg = reparse(src);

    if (london->parsed()) return cmd_london(c);
    if (pinning->parsed()) return cmd_pinning(c);
    if (rmacro->parsed()) return cmd_renorm_macro(c, vortex_file);
    if (rmeso->parsed()) return cmd_renorm_meso(c, degree, q, point);
    if (rmicro->parsed()) return cmd_renorm_micro(c, x0);
    if (gamma->parsed()) return cmd_gamma(c);
    if (fields->parsed()) return cmd_fields(c);
    if (pred->parsed()) return cmd_predict(c, hex);
    if (sim->parsed()) return cmd_simulate(c);
    if (analyze->parsed()) return cmd_analyze(c, run_dir, !no_compare);
    if (decomp->parsed()) return cmd_decomposition(c, run_dir);
    if (sweep->parsed()) return cmd_sweep(c);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace glpin::cli
