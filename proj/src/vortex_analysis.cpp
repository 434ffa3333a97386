#include "glpin/vortex_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

int degree(const ComplexField& v, const std::vector<int>& loop) {
  if (loop.size() < 3) throw ValidationError("degree: loop needs at least 3 nodes");
  double s = 0.0;
  for (std::size_t a = 0; a < loop.size(); ++a) {
    const cplx p = v.values[loop[a]], q = v.values[loop[(a + 1) % loop.size()]];
    if (std::abs(p) < 0.1) throw ValidationError("degree: contour passes through a near-zero of v");
    s += std::arg(q * std::conj(p));
  }
  const double w = s / (2 * std::numbers::pi);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.2) throw ValidationError("degree: winding is not close to an integer");
  return static_cast<int>(r);
}

std::vector<int> square_loop(const Grid& g, Point2 c, double r) {
  const int k0 = g.nearest(c);
  const int ci = g.col(k0), cj = g.row(k0);
  const int m = std::max(1, static_cast<int>(std::lround(r / g.h)));
  if (ci - m < 0 || cj - m < 0 || ci + m >= g.nx || cj + m >= g.ny) return {};
  std::vector<int> loop;
  for (int i = ci - m; i < ci + m; ++i) loop.push_back(g.idx(i, cj - m));
  for (int j = cj - m; j < cj + m; ++j) loop.push_back(g.idx(ci + m, j));
  for (int i = ci + m; i > ci - m; --i) loop.push_back(g.idx(i, cj + m));
  for (int j = cj + m; j > cj - m; --j) loop.push_back(g.idx(ci - m, j));
  return loop;
}

namespace {

// parabolic vertex through three equally spaced samples, as an offset in steps
double vertex_offset(double fm, double f0, double fp) {
  const double den = fm - 2 * f0 + fp;
  if (!(den > 0.0)) return 0.0;
  return std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
}

}  // namespace

std::vector<Defect> detect_defects(const ComplexField& v, double threshold) {
  const Grid& g = *v.grid;
  const int N = g.size();
  auto in_domain = [&](int k) { return g.node_w[k] > 0.0; };
  std::vector<int> label(N, -1);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < N; ++s) {
    if (label[s] >= 0 || !in_domain(s) || !(std::abs(v.values[s]) < threshold)) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<int> stack{s};
    label[s] = id;
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      comps[id].push_back(k);
      const int i = g.col(k), j = g.row(k);
      for (int d = 0; d < 4; ++d) {
        const int ii = i + kDx[d], jj = j + kDy[d];
        if (!g.in_range(ii, jj)) continue;
        const int q = g.idx(ii, jj);
        if (label[q] < 0 && in_domain(q) && std::abs(v.values[q]) < threshold) {
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
  }

  const int nc = static_cast<int>(comps.size());
  std::vector<Defect> out(nc);
  for (int c = 0; c < nc; ++c) {
    Defect& d = out[c];
    const auto& nodes = comps[c];
    d.nodes = static_cast<int>(nodes.size());
    int kmin = nodes.front();
    for (int k : nodes) {
      if (std::abs(v.values[k]) < std::abs(v.values[kmin])) kmin = k;
      if (!g.inside[k]) d.touches_boundary = true;
    }
    d.min_abs = std::abs(v.values[kmin]);
    const int i = g.col(kmin), j = g.row(kmin);
    Point2 ctr = g.pos(kmin);
    auto m = [&](int ii, int jj) { return std::abs(v.values[g.idx(ii, jj)]); };
    if (i > 0 && i + 1 < g.nx && j > 0 && j + 1 < g.ny) {
      ctr.x += g.h * vertex_offset(m(i - 1, j), m(i, j), m(i + 1, j));
      ctr.y += g.h * vertex_offset(m(i, j - 1), m(i, j), m(i, j + 1));
    }
    d.center = ctr;
    double r = 0.0;
    for (int k : nodes) r = std::max(r, distance(g.pos(k), ctr));
    d.radius = std::max(r, g.h);
  }

#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < nc; ++c) {
    Defect& d = out[c];
    double rc = 3.0 * d.radius;
    for (int o = 0; o < nc; ++o)
      if (o != c) rc = std::min(rc, 0.5 * distance(d.center, out[o].center));
    rc = std::max(rc, d.radius + g.h);
    if (d.touches_boundary) {
      d.degree = 0;
      d.degree_defined = false;
      continue;
    }
    const std::vector<int> loop = square_loop(g, d.center, rc);
    bool leaves = loop.empty();
    for (int k : loop)
      if (!g.inside[k]) leaves = true;
    if (leaves) {
      d.touches_boundary = true;
      d.degree = 0;
      d.degree_defined = false;
      continue;
    }
    try {
      d.degree = degree(v, loop);
    } catch (const ValidationError&) {
      d.degree = 0;
      d.degree_defined = false;
    }
  }
  return out;
}

SeparatedDisks separate_disks(const std::vector<Point2>& centers, double eta, double P) {
  if (!(P >= 2.0) || !(eta > 0.0)) throw ValidationError("separate_disks needs P >= 2 and eta > 0");
  SeparatedDisks out;
  for (std::size_t i = 0; i < centers.size(); ++i) out.J.push_back(static_cast<int>(i));
  // each merge drops one centre whose disk is swallowed by B(x_i, P kappa eta)
  for (;;) {
    bool merged = false;
    for (std::size_t a = 0; a < out.J.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < out.J.size() && !merged; ++b)
        if (distance(centers[out.J[a]], centers[out.J[b]]) < (P - 1) * out.kappa * eta) {
          out.J.erase(out.J.begin() + static_cast<std::ptrdiff_t>(b));
          out.kappa *= P;
          merged = true;
        }
    if (!merged) break;
  }
  const double tol = 1e-12 * std::max(1.0, out.kappa * eta);
  out.covering = true;
  for (const Point2& x : centers) {
    bool cov = false;
    for (int j : out.J) cov = cov || distance(x, centers[j]) + eta <= out.kappa * eta + tol;
    out.covering = out.covering && cov;
  }
  out.separated = true;
  for (std::size_t a = 0; a < out.J.size(); ++a)
    for (std::size_t b = a + 1; b < out.J.size(); ++b)
      out.separated = out.separated && distance(centers[out.J[a]], centers[out.J[b]]) >= (P - 1) * out.kappa * eta - tol;
  return out;
}

ClusterDegrees DefectReport::D() const {
  ClusterDegrees d;
  for (const ClusterEntry& c : clusters) d.push_back(c.D);
  return d;
}

int DefectReport::total_degree() const {
  int s = 0;
  for (const Defect& d : defects) s += d.degree;
  return s;
}

DefectReport cluster_report(std::vector<Defect> defects, const LondonData& london, double hex,
                            const PinningField* pinning) {
  DefectReport r;
  r.hex = hex;
  r.defects = std::move(defects);
  for (std::size_t k = 0; k < london.lambda_set.size(); ++k)
    r.clusters.push_back({static_cast<int>(k), london.lambda_set[k], 0, {}, {}});
  for (std::size_t i = 0; i < r.defects.size(); ++i) {
    Defect& d = r.defects[i];
    if (!r.clusters.empty()) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < r.clusters.size(); ++k)
        if (distance(d.center, r.clusters[k].p) < distance(d.center, r.clusters[best].p)) best = k;
      r.clusters[best].members.push_back(static_cast<int>(i));
      r.clusters[best].D += d.degree;
    }
    if (pinning && !pinning->inclusion_centers.empty()) {
      const PinningSpec& ps = pinning->spec;
      const double scale = ps.lambda * ps.delta;
      const Point2* y = &pinning->inclusion_centers.front();
      for (const Point2& c : pinning->inclusion_centers)
        if (distance(d.center, c) < distance(d.center, *y)) y = &c;
      if (distance(d.center, *y) < 0.5 * scale * ps.omega.diameter()) {
        d.inclusion_center = *y;
        d.micro_coord = (d.center - *y) / scale;
      }
    }
  }
  for (ClusterEntry& c : r.clusters) {
    if (c.D <= 0) continue;
    const double ell = std::sqrt(c.D / hex);
    for (int i : c.members) c.meso.push_back((r.defects[i].center - c.p) / ell);
  }
  return r;
}

Comparison compare(const DefectReport& report, const Prediction& prediction) {
  Comparison c;
  c.observed_d = report.total_degree();
  c.predicted_d = prediction.d;
  c.count_ok = c.observed_d >= prediction.d_lo && c.observed_d <= prediction.d_hi;
  const ClusterDegrees D = report.D();
  c.D_allowed = std::find(prediction.degrees.begin(), prediction.degrees.end(), D) != prediction.degrees.end() ||
                (prediction.d == 0 && c.observed_d == 0);
  c.all_degree_one = true;
  c.all_pinned = true;
  for (const Defect& d : report.defects) {
    c.all_degree_one = c.all_degree_one && d.degree == 1;
    c.all_pinned = c.all_pinned && d.inclusion_center.has_value();
  }
  const double lh = std::log(report.hex);
  const auto& ds = report.defects;
  for (std::size_t a = 0; a < ds.size(); ++a)
    for (std::size_t b = a + 1; b < ds.size(); ++b) {
      const double s = distance(ds[a].center, ds[b].center);
      c.min_separation = (a == 0 && b == 1) ? s : std::min(c.min_separation, s);
    }
  c.separation_scaled = c.min_separation * report.hex / lh;
  for (const ClusterEntry& cl : report.clusters)
    for (int i : cl.members) c.max_lambda_distance = std::max(c.max_lambda_distance, distance(ds[i].center, cl.p));
  c.lambda_distance_scaled = c.max_lambda_distance * std::sqrt(report.hex) / lh;
  return c;
}

}  // namespace glpin
