#include "glpin/desk.hpp"

#include <algorithm>
#include <cmath>

#include "glpin/errors.hpp"

namespace glpin {

double min_abs_v(const ComplexField& v) {
  const Grid& g = *v.grid;
  double m = INFINITY;
  for (int k = 0; k < g.size(); ++k)
    if (g.node_w[k] > 0.0) m = std::min(m, std::abs(v.values[k]));
  return m;
}

Desk prepare_desk(const DeskOptions& opt) {
  Desk d;
  d.options = opt;
  d.coarse = prepare_level(opt.domain, opt.coarse, opt.pinning);
  if (opt.fine > 0) {
    if (opt.fine <= opt.coarse) throw ValidationError("desk: fine resolution must exceed the coarse one");
    d.fine = prepare_level(opt.domain, opt.fine, opt.pinning);
  }
  d.fields = compute_fields(d.finest().london, opt.pinning, opt.fields);
  return d;
}

VortexConfig predicted_configuration(const Desk& desk, const ClusterDegrees& D, double hex) {
  const LondonData& L = desk.finest().london;
  const PinningField& pin = desk.finest().pinning;
  const PinningSpec& ps = pin.spec;
  std::vector<Point2> pts;
  for (std::size_t k = 0; k < D.size(); ++k) {
    if (D[k] <= 0) continue;
    const double ell = std::sqrt(D[k] / hex);
    const MesoResult m = minimize_w_meso(D[k], L.hessians[k], 0, 1);
    for (const Point2& x : m.points) pts.push_back(L.lambda_set[k] + x * ell);
  }
  // move each point to the micro minimiser of its inclusion, one vortex per inclusion
  std::vector<Point2> used;
  for (Point2& z : pts) {
    if (pin.inclusion_centers.empty()) break;
    const Point2* y = &pin.inclusion_centers.front();
    for (const Point2& c : pin.inclusion_centers)
      if (distance(z, c) < distance(z, *y)) y = &c;
    if (distance(z, *y) > 0.5 * ps.delta) continue;
    if (std::find(used.begin(), used.end(), *y) != used.end()) continue;
    used.push_back(*y);
    z = *y + desk.fields.micro.x0 * (ps.lambda * ps.delta);
  }
  VortexConfig c;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (distance(pts[i], pts[j]) < 8.0 * ps.epsilon) return c;
  c.points = pts;
  c.degrees.assign(pts.size(), 1);
  return c;
}

int expansion_argmin(const FieldsResult& F, double hex) {
  int best = 0;
  double e = predicted_energy(0, hex, F.J0, F.ladder);
  for (const auto& [d, w] : F.ladder.wbar) {
    const double x = predicted_energy(d, hex, F.J0, F.ladder);
    if (x < e) e = x, best = d;
  }
  return best;
}

DeskRun run_desk_point(const Desk& desk, double hex) {
  const DeskOptions& opt = desk.options;
  const bool two_level = opt.fine > 0;
  DeskRun run;
  run.hex = hex;
  run.prediction = predict(hex, desk.fields.ladder, opt.window);

  // vortex-free seed, the argmin of the energy expansion (at least one
  // vortex) and a single vortex
  std::vector<std::pair<std::string, VortexConfig>> seeds{{"vortex-free", VortexConfig{}}};
  run.expansion_d = expansion_argmin(desk.fields, hex);
  for (int d : {std::max(1, run.expansion_d), 1}) {
    if (seeds.size() > 1 && static_cast<int>(seeds.back().second.points.size()) == d) continue;
    const auto it = desk.fields.ladder.degrees.find(d);
    const ClusterDegrees D = (it != desk.fields.ladder.degrees.end() && !it->second.empty())
                                 ? it->second.front()
                                 : lambda_d_set(d, desk.fields.N0).front();
    VortexConfig c = predicted_configuration(desk, D, hex);
    if (!c.points.empty()) seeds.emplace_back("predicted d=" + std::to_string(d), c);
  }

  std::vector<GLState> finals(seeds.size());
  std::vector<MinimizeReport> reports(seeds.size());
  run.seeds.resize(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const DeskLevel& c = desk.coarse;
    GLState st = build_test_configuration(seeds[s].second, c.london, c.U, opt.pinning.epsilon, hex, &c.xi0_stream);
    MinimizeReport rep;
    st = minimize(st, opt.minimize, &rep);
    if (two_level) st = minimize(prolong(st, c, desk.fine), opt.minimize, &rep);
    run.seeds[s] = {seeds[s].first, static_cast<int>(seeds[s].second.points.size()), rep.energy, rep.sweeps,
                    rep.converged};
    finals[s] = std::move(st);
    reports[s] = std::move(rep);
  }
  // lowest energy wins; ties go to the earlier (vortex-free) seed
  for (std::size_t s = 1; s < seeds.size(); ++s)
    if (run.seeds[s].energy < run.seeds[run.chosen].energy) run.chosen = static_cast<int>(s);
  run.state = std::move(finals[run.chosen]);
  run.report = std::move(reports[run.chosen]);
  run.energy = run.report.energy;
  run.min_abs_v = min_abs_v(run.state.v);
  const DeskLevel& f = desk.finest();
  run.defects = cluster_report(detect_defects(run.state.v, 0.5 * opt.pinning.b), f.london, hex, &f.pinning);
  run.comparison = compare(run.defects, run.prediction);
  return run;
}

}  // namespace glpin
