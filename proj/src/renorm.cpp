#include "glpin/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "glpin/elliptic.hpp"
#include "glpin/errors.hpp"
#include "glpin/rng.hpp"

namespace glpin {

namespace {

constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_sum(const VortexConfig& c, Point2 z) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i) s += c.degrees[i] * std::log(distance(z, c.points[i]));
  return s;
}

double angle_sum(const VortexConfig& c, Point2 z) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i)
    s += c.degrees[i] * std::atan2(z.y - c.points[i].y, z.x - c.points[i].x);
  return s;
}

// Harmonic conjugate H of R (grad H = (-R_y, R_x)), integrated on the nodes
// where R is known: up and down the column through the reference node, then
// along each row.
std::vector<double> conjugate(const ScalarField& R) {
  const Grid& g = *R.grid;
  std::vector<double> H(g.size(), kNaN);
  auto r = [&](int i, int j) { return g.in_range(i, j) ? R.values[g.idx(i, j)] : kNaN; };
  const int k0 = g.nearest(g.domain.center);
  const int i0 = g.col(k0), j0 = g.row(k0);
  H[k0] = 0.0;
  // d/dy H = R_x, midpoint value from central differences at both ends
  for (int dir : {1, -1})
    for (int j = j0 + dir;; j += dir) {
      const int jp = j - dir;
      const double s = r(i0 + 1, j) - r(i0 - 1, j) + r(i0 + 1, jp) - r(i0 - 1, jp);
      if (!std::isfinite(s) || !std::isfinite(H[g.idx(i0, jp)])) break;
      H[g.idx(i0, j)] = H[g.idx(i0, jp)] + dir * 0.25 * s;
    }
  for (int j = 0; j < g.ny; ++j) {
    if (!std::isfinite(H[g.idx(i0, j)])) continue;
    for (int dir : {1, -1})
      for (int i = i0 + dir;; i += dir) {
        const int ip = i - dir;
        const double s = r(i, j + 1) - r(i, j - 1) + r(ip, j + 1) - r(ip, j - 1);
        if (!std::isfinite(s)) break;
        H[g.idx(i, j)] = H[g.idx(ip, j)] - dir * 0.25 * s;
      }
  }
  return H;
}

double sqdist(Point2 a, Point2 b) {
  const Point2 d = a - b;
  return dot(d, d);
}

// Energy without validation; +inf on coincident points.
double gas_energy(const std::vector<Point2>& x, const Potential& V, std::vector<Point2>* grad) {
  const std::size_t n = x.size();
  if (grad) grad->assign(n, Point2{});
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Point2 gv;
    e += V(x[i], gv);
    if (grad) (*grad)[i] = (*grad)[i] + gv;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = sqdist(x[i], x[j]);
      if (!(r2 > 0.0)) return std::numeric_limits<double>::infinity();
      e -= kPi * std::log(r2);  // both orderings of the pair
      if (grad) {
        const Point2 f = (x[i] - x[j]) * (2.0 * kPi / r2);
        (*grad)[i] = (*grad)[i] - f;
        (*grad)[j] = (*grad)[j] + f;
      }
    }
  }
  return e;
}

double grad_norm(const std::vector<Point2>& g) {
  double s = 0.0;
  for (const Point2& p : g) s += dot(p, p);
  return std::sqrt(s);
}

Potential trap(int D, const Sym2& Q) {
  return [D, Q](Point2 x, Point2& g) {
    g = Q.apply(x) * (2.0 * kPi * D);
    return kPi * D * Q.quad(x);
  };
}

// Q^{-1/2} via the eigen-decomposition.
Sym2 inverse_sqrt(const Sym2& Q) {
  const auto [l1, l2] = Q.eigenvalues();
  if (!(l1 > 0.0)) throw ValidationError("trap matrix must be positive definite");
  const Point2 v = Q.major_axis();  // eigenvector of l2
  const Point2 u{-v.y, v.x};
  const double a = 1.0 / std::sqrt(l1), b = 1.0 / std::sqrt(l2);
  return {a * u.x * u.x + b * v.x * v.x, a * u.x * u.y + b * v.x * v.y, a * u.y * u.y + b * v.y * v.y};
}

bool lex_less(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x) return a[i].x < b[i].x;
    if (a[i].y != b[i].y) return a[i].y < b[i].y;
  }
  return false;
}

}  // namespace

int VortexConfig::total_degree() const {
  int s = 0;
  for (int d : degrees) s += d;
  return s;
}

void VortexConfig::validate(const Grid& g) const {
  if (points.empty()) throw ValidationError("vortex configuration is empty");
  if (points.size() != degrees.size()) throw ValidationError("points and degrees differ in length");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (degrees[i] == 0) throw ValidationError("vortex degree must be nonzero");
    if (!(g.domain.level(points[i]) < -g.h)) throw ValidationError("vortex point too close to or outside the boundary");
    for (std::size_t j = 0; j < i; ++j)
      if (distance(points[i], points[j]) < 1e-12) throw ValidationError("coincident vortex points");
  }
}

ScalarField solve_regular_part(const VortexConfig& c, GridPtr grid) {
  c.validate(*grid);
  SolveOptions opt;
  opt.tolerance = 1e-12;
  return solve_dirichlet(OperatorKind::poisson, ScalarField(grid, 0.0), [&](Point2 z) { return -log_sum(c, z); }, opt);
}

double w_macro(const VortexConfig& c, const ScalarField& R) {
  c.validate(*R.grid);
  double w = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    for (std::size_t j = 0; j < c.points.size(); ++j)
      if (i != j) w -= kPi * c.degrees[i] * c.degrees[j] * std::log(distance(c.points[i], c.points[j]));
    w -= kPi * c.degrees[i] * interpolate(R, c.points[i]);
  }
  return w;
}

double w_macro(const VortexConfig& c, GridPtr grid) { return w_macro(c, solve_regular_part(c, grid)); }

ComplexField canonical_phase(const VortexConfig& c, GridPtr grid) {
  return canonical_phase(c, solve_regular_part(c, grid));
}

ComplexField canonical_phase(const VortexConfig& c, const ScalarField& R) {
  const GridPtr& grid = R.grid;
  const std::vector<double> H = conjugate(R);
  ComplexField w(grid, 0.0);
  for (int k = 0; k < grid->size(); ++k) {
    const double phase = angle_sum(c, grid->pos(k)) + (std::isfinite(H[k]) ? H[k] : 0.0);
    w.values[k] = std::polar(1.0, phase);
  }
  return w;
}

double dirichlet_energy_outside(const ComplexField& w, const VortexConfig& c, double r) {
  const Grid& g = *w.grid;
  auto outside = [&](Point2 m) {
    for (const Point2& z : c.points)
      if (distance(m, z) < r) return false;
    return true;
  };
  double e = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = g.idx(i, j);
      const Point2 p = g.pos(k);
      if (i + 1 < g.nx && g.ex_w[k] > 0.0 && outside(p + Point2{0.5 * g.h, 0.0})) {
        const double d = std::arg(w.values[k + 1] * std::conj(w.values[k]));
        e += 0.5 * g.ex_w[k] * d * d;
      }
      if (j + 1 < g.ny && g.ey_w[k] > 0.0 && outside(p + Point2{0.0, 0.5 * g.h})) {
        const double d = std::arg(w.values[k + g.nx] * std::conj(w.values[k]));
        e += 0.5 * g.ey_w[k] * d * d;
      }
    }
  return e;
}

double log_gas_energy(const std::vector<Point2>& x, const Potential& V, std::vector<Point2>* grad) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (x[i] == x[j]) throw ValidationError("coincident points in log gas");
  return gas_energy(x, V, grad);
}

double w_meso_energy(const std::vector<Point2>& x, const Sym2& Q, std::vector<Point2>* grad) {
  return log_gas_energy(x, trap(static_cast<int>(x.size()), Q), grad);
}

MesoResult descend_log_gas(std::vector<Point2> x, const Potential& V, const DescentOptions& opt) {
  MesoResult res;
  std::vector<Point2> g, gt, xt(x.size());
  double e = gas_energy(x, V, &g);
  double gn = grad_norm(g);
  double tau = 1e-2;
  int it = 0;
  for (; it < opt.max_iterations && gn > opt.grad_tol; ++it) {
    bool moved = false;
    while (tau > 1e-300) {
      for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] - g[i] * tau;
      const double et = gas_energy(xt, V, &gt);
      const double gtn = std::isfinite(et) ? grad_norm(gt) : 0.0;
      const bool decrease = et < e - 1e-4 * tau * gn * gn;
      // Energy differences drown in rounding close to a critical point; fall
      // back on the gradient there.
      const bool flat = std::isfinite(et) && std::abs(et - e) <= 1e-13 * (1.0 + std::abs(e)) && gtn < gn;
      if (decrease || flat) {
        x.swap(xt);
        g.swap(gt);
        e = et;
        gn = gtn;
        tau *= 2.0;
        moved = true;
        break;
      }
      tau *= 0.5;
    }
    if (!moved) break;
  }
  res.points = std::move(x);
  res.value = e;
  res.grad_norm = gn;
  res.iterations = it;
  res.converged = gn <= opt.grad_tol;
  return res;
}

MesoResult minimize_log_gas(int D, const Potential& V, const Sym2& Q, double scale, int multistart,
                            std::uint64_t seed) {
  if (D < 1) throw ValidationError("cluster degree must be positive");
  if (multistart <= 0) multistart = 8 * D;
  const Sym2 S = inverse_sqrt(Q);
  std::vector<MesoResult> runs(multistart);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < multistart; ++s) {
    auto rng = stream_rng(seed, static_cast<std::uint64_t>(s));
    std::vector<Point2> x(D);
    for (auto& p : x) {
      const double r = std::sqrt(uniform01(rng)), t = 2.0 * kPi * uniform01(rng);
      p = S.apply(Point2{r * std::cos(t), r * std::sin(t)}) * scale;
    }
    // Descend in units of `scale` so the gradient tolerance is scale free.
    for (auto& p : x) p = p / scale;
    const Potential Vs = [&](Point2 y, Point2& g) {
      const double v = V(y * scale, g);
      g = g * scale;
      return v;
    };
    runs[s] = descend_log_gas(std::move(x), Vs);
    for (auto& p : runs[s].points) p = p * scale;
    if (scale != 1.0) runs[s].value = gas_energy(runs[s].points, V, nullptr);
    std::sort(runs[s].points.begin(), runs[s].points.end(),
              [](Point2 a, Point2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    const double tol = 1e-10 * (1.0 + std::abs(runs[best].value));
    if (runs[s].value < runs[best].value - tol ||
        (std::abs(runs[s].value - runs[best].value) <= tol && lex_less(runs[s].points, runs[best].points)))
      best = s;
  }
  return runs[best];
}

MesoResult minimize_w_meso(int D, const Sym2& Q, int multistart, std::uint64_t seed) {
  if (D < 1) throw ValidationError("cluster degree must be positive");
  if (D == 1) {
    inverse_sqrt(Q);
    MesoResult r;
    r.points = {Point2{}};
    r.converged = true;
    return r;
  }
  return minimize_log_gas(D, trap(D, Q), Q, 1.0, multistart, seed);
}

}  // namespace glpin
