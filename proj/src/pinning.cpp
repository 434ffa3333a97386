#include "glpin/pinning.hpp"

#include <algorithm>
#include <cmath>

#include "glpin/elliptic.hpp"
#include "glpin/errors.hpp"

namespace glpin {

void PinningSpec::validate() const {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(b)) throw ValidationError("pinning.b must lie in (0,1)");
  if (!unit(lambda)) throw ValidationError("pinning.lambda must lie in (0,1)");
  if (!unit(delta)) throw ValidationError("pinning.delta must lie in (0,1)");
  if (!(epsilon > 0.0)) throw ValidationError("pinning.epsilon must be positive");
  if (omega.shape == Shape::rectangle) throw ValidationError("pinning.omega must be a disk or an ellipse");
  omega.validate();
  const Box bb = omega.bbox();
  if (!(bb.lo.x > -0.5 && bb.lo.y > -0.5 && bb.hi.x < 0.5 && bb.hi.y < 0.5))
    throw ValidationError("pinning.omega closure must lie inside (-1/2,1/2)^2");
  if (!omega.contains({0.0, 0.0})) throw ValidationError("pinning.omega must contain the origin");
}

std::optional<Point2> PinningField::inclusion_of(Point2 p) const {
  const double d = spec.delta;
  const Point2 c{d * std::round(p.x / d), d * std::round(p.y / d)};
  for (const Point2& y : inclusion_centers)
    if (distance(y, c) < 1e-12) {
      if (spec.omega.contains((p - y) / (spec.lambda * d))) return y;
      return std::nullopt;
    }
  return std::nullopt;
}

PinningField build_pinning_term(const PinningSpec& spec, GridPtr grid) {
  spec.validate();
  const Grid& g = *grid;
  if (spec.delta < 4.0 * g.h)
    throw ValidationError("pinning: cell size delta is under-resolved (need delta >= 4h)");
  PinningField pf;
  pf.spec = spec;
  pf.a = ScalarField(grid, 1.0);

  // cells delta*(m + Y) fully inside the (convex) domain
  const Box bb = g.domain.bbox();
  const double d = spec.delta;
  const int m0x = static_cast<int>(std::floor(bb.lo.x / d)) - 1, m1x = static_cast<int>(std::ceil(bb.hi.x / d)) + 1;
  const int m0y = static_cast<int>(std::floor(bb.lo.y / d)) - 1, m1y = static_cast<int>(std::ceil(bb.hi.y / d)) + 1;
  for (int my = m0y; my <= m1y; ++my)
    for (int mx = m0x; mx <= m1x; ++mx) {
      const Point2 c{mx * d, my * d};
      bool in = true;
      for (int s = 0; s < 4 && in; ++s) {
        const Point2 corner = c + Point2{(s & 1 ? 0.5 : -0.5) * d, (s & 2 ? 0.5 : -0.5) * d};
        in = g.domain.level(corner) <= 0.0;
      }
      if (in) pf.inclusion_centers.push_back(c);
    }

  // dilution: inclusions thinner than one grid step are not represented
  if (spec.lambda * d * spec.omega.diameter() < g.h) return pf;
  for (int k = 0; k < g.size(); ++k)
    if (pf.inclusion_of(g.pos(k))) pf.a.values[k] = spec.b;
  return pf;
}

kernels::LatticeProblem LatticeCoefficients::problem(double hex, bool with_field) const {
  kernels::LatticeProblem p;
  p.nx = grid->nx;
  p.ny = grid->ny;
  p.h = grid->h;
  p.cx = cx;
  p.cy = cy;
  p.pot = pot;
  p.target = target;
  if (with_field) p.plaq_w = grid->plaq_w;
  p.hex = hex;
  return p;
}

LatticeCoefficients coefficients_E(const ScalarField& a, double epsilon) {
  const Grid& g = *a.grid;
  LatticeCoefficients c{a.grid, g.ex_w, g.ey_w, std::vector<double>(g.size()), std::vector<double>(g.size())};
  const double s = g.h * g.h / (4.0 * epsilon * epsilon);
  for (int k = 0; k < g.size(); ++k) {
    c.pot[k] = g.node_w[k] * s;
    c.target[k] = a.values[k] * a.values[k];
  }
  return c;
}

LatticeCoefficients coefficients_F(const ScalarField& U, double epsilon) {
  const Grid& g = *U.grid;
  const int N = g.size();
  LatticeCoefficients c{U.grid, std::vector<double>(N, 0.0), std::vector<double>(N, 0.0), std::vector<double>(N),
                        std::vector<double>(N, 1.0)};
  const double s = g.h * g.h / (4.0 * epsilon * epsilon);
  const auto& u = U.values;
  for (int k = 0; k < N; ++k) {
    if (g.ex_w[k] > 0.0) c.cx[k] = g.ex_w[k] * u[k] * u[k + 1];
    if (g.ey_w[k] > 0.0) c.cy[k] = g.ey_w[k] * u[k] * u[k + g.nx];
    const double u2 = u[k] * u[k];
    c.pot[k] = g.node_w[k] * s * u2 * u2;
  }
  return c;
}

namespace {

// Compact graph over active lattice nodes.
struct NodeGraph {
  std::vector<int> nodes;  // compact -> node
  std::vector<int> nbr;    // 4 per node, -1 if absent
  std::vector<double> w;   // edge weight per slot
  std::vector<double> p;   // potential coefficient
  std::vector<double> a2;

  explicit NodeGraph(const Grid& g, const ScalarField& a, double eps) {
    std::vector<int> cidx(g.size(), -1);
    for (int k = 0; k < g.size(); ++k)
      if (g.node_active[k]) {
        cidx[k] = static_cast<int>(nodes.size());
        nodes.push_back(k);
      }
    const int n = static_cast<int>(nodes.size());
    nbr.assign(4 * static_cast<std::size_t>(n), -1);
    w.assign(4 * static_cast<std::size_t>(n), 0.0);
    p.resize(n);
    a2.resize(n);
    const double s = g.h * g.h / (4.0 * eps * eps);
    for (int c = 0; c < n; ++c) {
      const int k = nodes[c];
      const int i = g.col(k), j = g.row(k);
      const double ew[4] = {i + 1 < g.nx ? g.ex_w[k] : 0.0, i > 0 ? g.ex_w[k - 1] : 0.0,
                            j + 1 < g.ny ? g.ey_w[k] : 0.0, j > 0 ? g.ey_w[k - g.nx] : 0.0};
      for (int d = 0; d < 4; ++d)
        if (ew[d] > 0.0) {
          nbr[4 * c + d] = cidx[k + kDx[d] + kDy[d] * g.nx];
          w[4 * c + d] = ew[d];
        }
      p[c] = g.node_w[k] * s;
      a2[c] = a.values[k] * a.values[k];
    }
  }

  int size() const { return static_cast<int>(nodes.size()); }

  double energy(const std::vector<double>& U) const {
    double e = 0.0;
    for (int c = 0; c < size(); ++c) {
      for (int d : {0, 2})
        if (nbr[4 * c + d] >= 0) {
          const double t = U[nbr[4 * c + d]] - U[c];
          e += 0.5 * w[4 * c + d] * t * t;
        }
      const double r = a2[c] - U[c] * U[c];
      e += p[c] * r * r;
    }
    return e;
  }

  void gradient(const std::vector<double>& U, std::vector<double>& G) const {
    for (int c = 0; c < size(); ++c) {
      double s = 0.0;
      for (int d = 0; d < 4; ++d)
        if (nbr[4 * c + d] >= 0) s += w[4 * c + d] * (U[c] - U[nbr[4 * c + d]]);
      G[c] = s - 4.0 * p[c] * (a2[c] - U[c] * U[c]) * U[c];
    }
  }
};

}  // namespace

ScalarField solve_lassoued_mironescu(const PinningField& pf, double epsilon, LMReport* report, double tolerance) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const Grid& g = *pf.a.grid;
  const NodeGraph G(g, pf.a, epsilon);
  const int n = G.size();
  const double rscale = epsilon * epsilon / (g.h * g.h);
  std::vector<double> U(n), grad(n), trial(n), diag(n), step(n);
  for (int c = 0; c < n; ++c) U[c] = std::sqrt(G.a2[c]);

  auto residual = [&](const std::vector<double>& gr) {
    double m = 0.0;
    for (double v : gr) m = std::max(m, std::abs(v));
    return m * rscale;
  };
  auto hess_diag = [&](const std::vector<double>& u) {
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int d = 0; d < 4; ++d) s += G.w[4 * c + d];
      diag[c] = s + 4.0 * G.p[c] * (3.0 * u[c] * u[c] - G.a2[c]);
    }
  };

  LMReport rep;
  double E = G.energy(U);
  G.gradient(U, grad);
  // preconditioned gradient flow with backtracking
  for (int it = 0; it < 40; ++it) {
    hess_diag(U);
    double tau = 1.0;
    bool accepted = false;
    while (tau > 1e-6) {
      for (int c = 0; c < n; ++c) trial[c] = U[c] - tau * grad[c] / std::max(diag[c], 1e-12 + std::abs(diag[c]));
      const double Et = G.energy(trial);
      if (Et < E) {
        U.swap(trial);
        E = Et;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    ++rep.flow_steps;
    G.gradient(U, grad);
    if (!accepted) break;
  }

  // Newton polish
  double res = residual(grad);
  while (res > tolerance) {
    if (rep.newton_steps >= 60) throw SolverError("Lassoued-Mironescu Newton iteration stalled", res, rep.newton_steps);
    hess_diag(U);
    std::vector<double> inv(n);
    for (int c = 0; c < n; ++c) inv[c] = 1.0 / std::max(std::abs(diag[c]), 1e-300);
    auto Hx = [&](std::span<const double> x, std::span<double> y) {
      for (int c = 0; c < n; ++c) {
        double s = diag[c] * x[c];
        for (int d = 0; d < 4; ++d)
          if (G.nbr[4 * c + d] >= 0) s -= G.w[4 * c + d] * x[G.nbr[4 * c + d]];
        y[c] = s;
      }
    };
    std::vector<double> rhs(n);
    for (int c = 0; c < n; ++c) rhs[c] = -grad[c];
    std::fill(step.begin(), step.end(), 0.0);
    pcg(Hx, inv, rhs, step, 1e-12, 4 * n);
    double t = 1.0;
    for (;;) {
      for (int c = 0; c < n; ++c) trial[c] = U[c] + t * step[c];
      std::vector<double> gt(n);
      G.gradient(trial, gt);
      const double rt = residual(gt);
      if (rt < res || t < 1e-4) {
        U.swap(trial);
        grad.swap(gt);
        res = rt;
        break;
      }
      t *= 0.5;
    }
    ++rep.newton_steps;
  }
  rep.residual = res;
  if (report) *report = rep;

  ScalarField out(pf.a.grid, 1.0);
  const double b = pf.spec.b;
  for (int c = 0; c < n; ++c) out.values[G.nodes[c]] = std::clamp(U[c], std::min(b, 1.0), 1.0);
  return out;
}

double energy_E(const ComplexField& u, const ScalarField& a, double epsilon) {
  const auto c = coefficients_E(a, epsilon);
  return kernels::lattice_energy(c.problem(), u.values, {}, {}).total();
}

double energy_F(const ComplexField& v, const ScalarField& U, double epsilon) {
  const auto c = coefficients_F(U, epsilon);
  return kernels::lattice_energy(c.problem(), v.values, {}, {}).total();
}

double decoupling_residual(const ScalarField& U, const ComplexField& v, const ScalarField& a, double epsilon) {
  ComplexField uv(v.grid);
  ComplexField uu(v.grid);
  for (int k = 0; k < v.grid->size(); ++k) {
    uv.values[k] = U.values[k] * v.values[k];
    uu.values[k] = U.values[k];
  }
  const double Euv = energy_E(uv, a, epsilon);
  const double EU = energy_E(uu, a, epsilon);
  const double Fv = energy_F(v, U, epsilon);
  return std::abs(Euv - EU - Fv) / std::max(1.0, Euv);
}

}  // namespace glpin
