#include "glpin/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glpin/errors.hpp"
#include "glpin/kernels.hpp"

namespace glpin {

namespace {

constexpr double kThetaMin = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Assembled {
  std::vector<double> diag;
  std::vector<int> nbr;
  std::vector<double> inv_diag;
};

Assembled assemble(const Grid& g, OperatorKind kind) {
  const int n = g.interior_count();
  Assembled a;
  a.diag.assign(n, 0.0);
  a.nbr.assign(4 * static_cast<std::size_t>(n), -1);
  const double shift = kind == OperatorKind::screened ? g.h * g.h : 0.0;
  for (int u = 0; u < n; ++u) {
    const int k = g.interior_nodes[u];
    double d = shift;
    for (int dir = 0; dir < 4; ++dir) {
      const int q = k + kDx[dir] + kDy[dir] * g.nx;
      if (g.inside[q]) {
        a.nbr[4 * u + dir] = g.unknown[q];
        d += 1.0;
      } else {
        d += 1.0 / std::max(g.cuts[u].theta[dir], kThetaMin);
      }
    }
    a.diag[u] = d;
  }
  a.inv_diag.resize(n);
  for (int u = 0; u < n; ++u) a.inv_diag[u] = 1.0 / a.diag[u];
  return a;
}

}  // namespace

CgResult pcg(const std::function<void(std::span<const double>, std::span<double>)>& apply,
             std::span<const double> inv_diag, std::span<const double> b, std::span<double> x, double tol,
             int max_iter, bool singular) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  auto project = [&](std::span<double> w) {
    if (!singular || n == 0) return;
    double s = 0.0;
    for (double e : w) s += e;
    s /= static_cast<double>(n);
    for (double& e : w) e -= s;
  };
  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  project(r);
  const double bnorm = std::sqrt(kernels::dot(b, b));
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  double rnorm = std::sqrt(kernels::dot(r, r));
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  project(z);
  p = z;
  double rz = kernels::dot(r, z);
  int it = 0;
  while (rnorm / bnorm > tol && it < max_iter) {
    apply(p, q);
    const double pq = kernels::dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, q, r);
    if (singular) project(r);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    project(z);
    const double rz_new = kernels::dot(r, z);
    kernels::xpby(z, rz_new / rz, p);
    rz = rz_new;
    rnorm = std::sqrt(kernels::dot(r, r));
    ++it;
  }
  if (singular) project(x);
  res.iterations = it;
  res.relative_residual = rnorm / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

void add_dirac(ScalarField& f, Point2 p, double mass) {
  const Grid& g = *f.grid;
  const double fx = (p.x - g.origin.x) / g.h, fy = (p.y - g.origin.y) / g.h;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
  const double tx = fx - i, ty = fy - j, s = mass / (g.h * g.h);
  f.values[g.idx(i, j)] += (1 - tx) * (1 - ty) * s;
  f.values[g.idx(i + 1, j)] += tx * (1 - ty) * s;
  f.values[g.idx(i, j + 1)] += (1 - tx) * ty * s;
  f.values[g.idx(i + 1, j + 1)] += tx * ty * s;
}

void extend_to_band(ScalarField& u, const BoundaryFn& g) {
  const Grid& gr = *u.grid;
  const int N = gr.size();
  std::vector<int> ring(N, -1);
  for (int k : gr.interior_nodes) ring[k] = 0;
  std::vector<double> acc(N, 0.0);
  std::vector<int> cnt(N, 0);
  // ring 1: linear through the boundary crossing
  for (std::size_t a = 0; a < gr.interior_nodes.size(); ++a) {
    const int k = gr.interior_nodes[a];
    for (int d = 0; d < 4; ++d) {
      const int step = kDx[d] + kDy[d] * gr.nx;
      const int q = k + step;
      if (gr.inside[q]) continue;
      const double t = std::max(gr.cuts[a].theta[d], kThetaMin);
      const double gf = g(gr.cuts[a].foot[d]);
      const int m = k - step;
      double ext;
      if (t == 1.0)
        ext = gf;
      else if (t < 0.25 && gr.inside[m])
        ext = gf + (gf - u.values[m]) * (1.0 - t) / (1.0 + t);
      else
        ext = u.values[k] + (gf - u.values[k]) / t;
      acc[q] += ext;
      cnt[q] += 1;
    }
  }
  for (int k = 0; k < N; ++k)
    if (ring[k] != 0) u.values[k] = kNaN;
  for (int k = 0; k < N; ++k)
    if (cnt[k] > 0) {
      u.values[k] = acc[k] / cnt[k];
      ring[k] = 1;
    }
  // further rings: linear extrapolation along grid lines
  for (int r = 2; r <= 3; ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int j = 0; j < gr.ny; ++j)
      for (int i = 0; i < gr.nx; ++i) {
        const int s = gr.idx(i, j);
        if (ring[s] >= 0) continue;
        for (int d = 0; d < 4; ++d) {
          if (!gr.in_range(i + 2 * kDx[d], j + 2 * kDy[d])) continue;
          const int q = gr.idx(i + kDx[d], j + kDy[d]), t = gr.idx(i + 2 * kDx[d], j + 2 * kDy[d]);
          if (ring[q] == r - 1 && ring[t] >= 0 && ring[t] <= r - 1) {
            acc[s] += 2.0 * u.values[q] - u.values[t];
            cnt[s] += 1;
          }
        }
      }
    for (int k = 0; k < N; ++k)
      if (cnt[k] > 0) {
        u.values[k] = acc[k] / cnt[k];
        ring[k] = r;
      }
  }
}

ScalarField solve_dirichlet(OperatorKind kind, const ScalarField& rhs, const BoundaryFn& g, const SolveOptions& opt,
                            SolveReport* report) {
  const Grid& gr = *rhs.grid;
  const Assembled a = assemble(gr, kind);
  const int n = gr.interior_count();
  const double h2 = gr.h * gr.h;
  std::vector<double> b(n), x(n, 0.0);
  for (int u = 0; u < n; ++u) {
    const int k = gr.interior_nodes[u];
    double s = h2 * rhs.values[k];
    for (int d = 0; d < 4; ++d)
      if (a.nbr[4 * u + d] < 0) s += g(gr.cuts[u].foot[d]) / std::max(gr.cuts[u].theta[d], kThetaMin);
    b[u] = s;
  }
  if (!std::all_of(b.begin(), b.end(), [](double v) { return std::isfinite(v); }))
    throw ValidationError("solve_dirichlet: non-finite right-hand side or boundary data");
  const kernels::Stencil5 st{a.diag, a.nbr};
  const int cap = opt.max_iterations > 0 ? opt.max_iterations : 50 * gr.resolution;
  const CgResult r = pcg([&](std::span<const double> in, std::span<double> out) { kernels::apply(st, in, out); },
                         a.inv_diag, b, x, opt.tolerance, cap);
  if (report) *report = {r.iterations, r.relative_residual};
  if (!r.converged)
    throw SolverError("conjugate gradients did not converge", r.relative_residual, r.iterations);
  ScalarField out(rhs.grid, kNaN);
  for (int u = 0; u < n; ++u) out.values[gr.interior_nodes[u]] = x[u];
  extend_to_band(out, g);
  return out;
}

ScalarField solve_dirichlet(OperatorKind kind, const ScalarField& rhs, const ScalarField& boundary,
                            const SolveOptions& opt, SolveReport* report) {
  return solve_dirichlet(kind, rhs, [&](Point2 p) { return interpolate(boundary, p); }, opt, report);
}

ScalarField sw_laplacian(const ScalarField& u, const BoundaryFn& g) {
  const Grid& gr = *u.grid;
  ScalarField out(u.grid, kNaN);
  const double ih2 = 1.0 / (gr.h * gr.h);
  for (int a = 0; a < gr.interior_count(); ++a) {
    const int k = gr.interior_nodes[a];
    double s = 0.0;
    for (int d = 0; d < 4; ++d) {
      const int q = k + kDx[d] + kDy[d] * gr.nx;
      if (gr.inside[q])
        s += u.values[q] - u.values[k];
      else
        s += (g(gr.cuts[a].foot[d]) - u.values[k]) / std::max(gr.cuts[a].theta[d], kThetaMin);
    }
    out.values[k] = s * ih2;
  }
  return out;
}

}  // namespace glpin
