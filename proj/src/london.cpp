#include "glpin/london.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

namespace {

constexpr double kTight = 1e-13;
const BoundaryFn kZero = [](Point2) { return 0.0; };

bool is_local_min(const ScalarField& f, int k) {
  const Grid& g = *f.grid;
  const double v = f.values[k];
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      if (!di && !dj) continue;
      const double w = f.values[k + di + dj * g.nx];
      if (std::isfinite(w) && w < v) return false;
    }
  return true;
}

double safe_value(const ScalarField& f, int i, int j) {
  const Grid& g = *f.grid;
  i = std::clamp(i, 0, g.nx - 1);
  j = std::clamp(j, 0, g.ny - 1);
  const double v = f.values[g.idx(i, j)];
  return std::isfinite(v) ? v : 0.0;
}

}  // namespace

std::pair<double, double> Sym2::eigenvalues() const {
  const double m = 0.5 * (xx + yy), d = std::hypot(0.5 * (xx - yy), xy);
  return {m - d, m + d};
}

Point2 Sym2::major_axis() const {
  const double lam = eigenvalues().second;
  Point2 v = std::abs(xy) > 1e-14 ? Point2{xy, lam - xx} : (xx >= yy ? Point2{1, 0} : Point2{0, 1});
  return v / norm(v);
}

double SyntheticXi0::operator()(Point2 x) const {
  double prod = 1.0;
  for (const Point2& p : wells) {
    const Point2 d = x - p;
    prod *= dot(d, d);
  }
  double L = 1.0;
  if (wells.size() > 1) {
    double s = 0.0;
    int c = 0;
    for (std::size_t i = 0; i < wells.size(); ++i)
      for (std::size_t j = i + 1; j < wells.size(); ++j, ++c) s += distance(wells[i], wells[j]);
    L = s / c;
  }
  return -depth + curvature * prod / std::pow(L, 2.0 * (static_cast<double>(wells.size()) - 1.0));
}

ScalarField sample_synthetic(GridPtr grid, const SyntheticXi0& s) {
  if (s.wells.empty()) throw ValidationError("synthetic_xi0: at least one well required");
  if (!(s.depth > 0.0) || !(s.curvature > 0.0))
    throw ValidationError("synthetic_xi0: depth and curvature must be positive");
  for (const Point2& p : s.wells)
    if (!grid->domain.contains(p)) throw ValidationError("synthetic_xi0: well outside the domain");
  return ScalarField::sample(grid, [&](Point2 x) { return s(x); });
}

LambdaSet find_lambda(const ScalarField& xi0, double tol) {
  const Grid& g = *xi0.grid;
  double mn = 1e300;
  for (int k : g.interior_nodes) mn = std::min(mn, xi0.values[k]);
  if (tol < 0.0) tol = 1e-4 * std::abs(mn);

  struct Cand {
    Point2 p;
    double v;
  };
  std::vector<Cand> cands;
  for (int k : g.interior_nodes) {
    if (xi0.values[k] > mn + tol || !is_local_min(xi0, k)) continue;
    const int i = g.col(k), j = g.row(k);
    auto f = [&](int a, int b) { return safe_value(xi0, i + a, j + b); };
    // local quadratic from the 3x3 stencil
    const double h = g.h;
    const double fx = (f(1, 0) - f(-1, 0)) / (2 * h), fy = (f(0, 1) - f(0, -1)) / (2 * h);
    const double fxx = (f(1, 0) - 2 * f(0, 0) + f(-1, 0)) / (h * h);
    const double fyy = (f(0, 1) - 2 * f(0, 0) + f(0, -1)) / (h * h);
    const double fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h * h);
    const double det = fxx * fyy - fxy * fxy;
    Point2 off{};
    if (det > 0 && fxx > 0) {
      off = {-(fyy * fx - fxy * fy) / det, -(-fxy * fx + fxx * fy) / det};
      const double l = norm(off);
      if (l > h) off = off * (h / l);
    }
    const double val = f(0, 0) + fx * off.x + fy * off.y +
                       0.5 * (fxx * off.x * off.x + 2 * fxy * off.x * off.y + fyy * off.y * off.y);
    const Point2 p = g.pos(k) + off;
    bool dup = false;
    for (auto& c : cands)
      if (distance(c.p, p) < 2.5 * h) {
        dup = true;
        if (val < c.v) c = {p, val};
      }
    if (!dup) cands.push_back({p, val});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
  });

  LambdaSet out;
  const int s = 4;
  for (const Cand& c : cands) {
    const int k = g.nearest(c.p);
    const int i = g.col(k), j = g.row(k);
    auto f = [&](int a, int b) { return safe_value(xi0, i + a, j + b); };
    const double d = s * g.h;
    Sym2 H;
    H.xx = (f(s, 0) - 2 * f(0, 0) + f(-s, 0)) / (d * d);
    H.yy = (f(0, s) - 2 * f(0, 0) + f(0, -s)) / (d * d);
    H.xy = (f(s, s) - f(s, -s) - f(-s, s) + f(-s, -s)) / (4 * d * d);
    const auto [lo, hi] = H.eigenvalues();
    if (!(hi > 0.0) || !(lo > 1e-6 * hi))
      throw NonDegeneracyError("degenerate Hessian of xi0 at a minimum point", lo, 0);
    out.points.push_back(c.p);
    out.values.push_back(c.v);
    out.hessians.push_back(H);
  }
  return out;
}

double compute_J0(const ScalarField& xi0) {
  const Grid& g = *xi0.grid;
  double kin = 0.0, pot = 0.0;
  auto val = [&](int k) {
    const double v = xi0.values[k];
    return std::isfinite(v) ? v : 0.0;
  };
  for (int k = 0; k < g.size(); ++k) {
    if (g.ex_w[k] > 0.0) kin += g.ex_w[k] * std::pow(val(k + 1) - val(k), 2);
    if (g.ey_w[k] > 0.0) kin += g.ey_w[k] * std::pow(val(k + g.nx) - val(k), 2);
    if (g.node_w[k] > 0.0) pot += g.node_w[k] * g.h * g.h * val(k) * val(k);
  }
  return 0.5 * (kin + pot);
}

LondonData london_from_xi0(const ScalarField& xi0) {
  LondonData d;
  d.xi0 = xi0;
  d.h0 = xi0;
  for (double& v : d.h0.values) v += 1.0;
  d.synthetic = true;
  const LambdaSet L = find_lambda(xi0);
  d.lambda_set = L.points;
  d.hessians = L.hessians;
  double mn = 0.0;
  for (double v : L.values) mn = std::min(mn, v);
  d.xi0_inf_norm = -mn;
  d.M_omega = 2 * std::numbers::pi * d.xi0_inf_norm;
  d.J0 = compute_J0(xi0);
  return d;
}

LondonData solve_london(GridPtr grid) {
  LondonData d;
  d.h0 = solve_dirichlet(OperatorKind::screened, ScalarField(grid), [](Point2) { return 1.0; }, {kTight, 0});
  ScalarField rhs(grid);
  for (int k : grid->interior_nodes) rhs.values[k] = -d.h0.values[k];
  d.xi0 = solve_dirichlet(OperatorKind::poisson, rhs, kZero, {kTight, 0});
  const LambdaSet L = find_lambda(d.xi0);
  d.lambda_set = L.points;
  d.hessians = L.hessians;
  double mn = 0.0;
  for (double v : L.values) mn = std::min(mn, v);
  for (int k : grid->interior_nodes) mn = std::min(mn, d.xi0.values[k]);
  d.xi0_inf_norm = -mn;
  d.M_omega = 2 * std::numbers::pi * d.xi0_inf_norm;
  d.J0 = compute_J0(d.xi0);
  return d;
}

double london_identity_residual(const LondonData& d) {
  const ScalarField lap = sw_laplacian(d.xi0, kZero);
  double m = 0.0;
  for (int k : d.xi0.grid->interior_nodes) m = std::max(m, std::abs(d.xi0.values[k] - (lap.values[k] - 1.0)));
  return m;
}

ScalarField solve_zeta(const std::vector<Point2>& points, const std::vector<int>& degrees, GridPtr grid) {
  if (points.size() != degrees.size()) throw ValidationError("solve_zeta: points and degrees differ in length");
  ScalarField rhs(grid);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(grid->domain.level(points[i]) < -grid->h)) throw ValidationError("solve_zeta: point on or outside the boundary");
    for (std::size_t j = 0; j < i; ++j)
      if (distance(points[i], points[j]) < 1e-12) throw ValidationError("solve_zeta: coincident points");
    add_dirac(rhs, points[i], 2 * std::numbers::pi * degrees[i]);
  }
  const ScalarField gfield = solve_dirichlet(OperatorKind::screened, rhs, kZero, {1e-12, 0});
  ScalarField r2(grid);
  for (int k : grid->interior_nodes) r2.values[k] = -gfield.values[k];
  return solve_dirichlet(OperatorKind::poisson, r2, kZero, {1e-12, 0});
}

double tilde_V_at_min(const ScalarField& zeta, const std::vector<Point2>& points, const std::vector<int>& degrees) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += degrees[i] * regular_value(zeta, points[i]);
  return std::numbers::pi * s;
}

double tilde_V_general(const ScalarField& zeta, const std::vector<Point2>& points, const std::vector<int>& degrees) {
  const Grid& g = *zeta.grid;
  double lin = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) lin += degrees[i] * regular_value(zeta, points[i]);
  const ScalarField lap = sw_laplacian(zeta, kZero);
  double q = 0.0;
  for (int k : g.interior_nodes) q += g.h * g.h * lap.values[k] * lap.values[k];
  auto val = [&](int k) {
    const double v = zeta.values[k];
    return std::isfinite(v) ? v : 0.0;
  };
  for (int k = 0; k < g.size(); ++k) {
    if (g.ex_w[k] > 0.0) q += g.ex_w[k] * std::pow(val(k + 1) - val(k), 2);
    if (g.ey_w[k] > 0.0) q += g.ey_w[k] * std::pow(val(k + g.nx) - val(k), 2);
  }
  return 2 * std::numbers::pi * lin + 0.5 * q;
}

TildeV tilde_V(const ScalarField& zeta, const std::vector<Point2>& points, const std::vector<int>& degrees) {
  return {tilde_V_general(zeta, points, degrees), tilde_V_at_min(zeta, points, degrees)};
}

}  // namespace glpin
