#include "glpin/gl_sim.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>

#include "glpin/bbh.hpp"
#include "glpin/errors.hpp"

namespace glpin {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Llt = Eigen::SimplicialLLT<SpMat>;

std::vector<double> scaled_theta(const std::vector<double>& a, double h) {
  std::vector<double> t(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) t[k] = h * a[k];
  return t;
}

EdgeField edges_from_theta(GridPtr g, const std::vector<double>& tx, const std::vector<double>& ty) {
  EdgeField A(g);
  for (int k = 0; k < g->size(); ++k) {
    A.ax[k] = g->ex_link[k] ? tx[k] / g->h : 0.0;
    A.ay[k] = g->ey_link[k] ? ty[k] / g->h : 0.0;
  }
  return A;
}

bool plaquette_on(const Grid& g, int k) { return g.plaq_w[k] > 0.0; }

// theta = T psi on link edges
void theta_of_stream(const Grid& g, const double* psi, double* tx, double* ty) {
  const int nx = g.nx;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < g.size(); ++k) {
    tx[k] = g.ex_link[k] ? -(psi[k] - psi[k - nx]) : 0.0;
    ty[k] = g.ey_link[k] ? psi[k] - psi[k - 1] : 0.0;
  }
}

// T^t g restricted to active plaquettes
void stream_adjoint(const Grid& g, const double* gx, const double* gy, double* out) {
  const int nx = g.nx;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < g.size(); ++k)
    out[k] = plaquette_on(g, k) ? -gx[k] + gx[k + nx] + gy[k] - gy[k + 1] : 0.0;
}

// Compact indexing of active plaquettes and the Dirichlet 5-point matrix L.
struct PlaquetteSpace {
  const Grid* g = nullptr;
  std::vector<int> cells;  // compact -> plaquette
  std::vector<int> cidx;   // plaquette -> compact or -1
  std::vector<double> inv_w;
  Llt llt;

  explicit PlaquetteSpace(const Grid& grid) : g(&grid), cidx(grid.size(), -1) {
    for (int k = 0; k < grid.size(); ++k)
      if (plaquette_on(grid, k)) {
        cidx[k] = static_cast<int>(cells.size());
        cells.push_back(k);
      }
    const int n = static_cast<int>(cells.size());
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(5 * n);
    inv_w.resize(n);
    const int off[4] = {1, -1, grid.nx, -grid.nx};
    for (int c = 0; c < n; ++c) {
      const int k = cells[c];
      tr.emplace_back(c, c, 4.0);
      for (int o : off)
        if (cidx[k + o] >= 0) tr.emplace_back(c, cidx[k + o], -1.0);
      inv_w[c] = 1.0 / std::max(grid.plaq_w[k], 0.25);
    }
    SpMat L(n, n);
    L.setFromTriplets(tr.begin(), tr.end());
    llt.compute(L);
    if (llt.info() != Eigen::Success) throw SolverError("plaquette Laplacian factorisation failed");
  }

  int size() const { return static_cast<int>(cells.size()); }

  // h^2 L^{-1} W~^{-1} L^{-1}, on full-length arrays
  void precondition(const double* r, double* z) const {
    const int n = size();
    Eigen::VectorXd b(n);
    for (int c = 0; c < n; ++c) b[c] = r[cells[c]];
    Eigen::VectorXd y = llt.solve(b);
    for (int c = 0; c < n; ++c) y[c] *= inv_w[c];
    const Eigen::VectorXd x = llt.solve(y);
    const double h2 = g->h * g->h;
    for (int c = 0; c < n; ++c) z[cells[c]] = h2 * x[c];
  }

  // (L p)_P on full arrays
  void laplace(const double* p, double* out) const {
    const int nx = g->nx;
    for (int c = 0; c < size(); ++c) {
      const int k = cells[c];
      double s = 4.0 * p[k];
      for (int o : {1, -1, nx, -nx})
        if (cidx[k + o] >= 0) s -= p[k + o];
      out[k] = s;
    }
  }
};

double dot_full(const std::vector<double>& a, const std::vector<double>& b) {
  return kernels::dot(a, b);
}

}  // namespace

GLEnergy energy_full(const GLState& s) {
  const Grid& g = *s.grid();
  const auto c = coefficients_F(s.U, s.epsilon);
  const auto tx = scaled_theta(s.A.ax, g.h), ty = scaled_theta(s.A.ay, g.h);
  return kernels::lattice_energy(c.problem(s.hex, true), s.v.values, tx, ty);
}

GLEnergy energy_E_full(const ComplexField& u, const EdgeField& A, const ScalarField& a, double epsilon, double hex) {
  const Grid& g = *u.grid;
  const auto c = coefficients_E(a, epsilon);
  const auto tx = scaled_theta(A.ax, g.h), ty = scaled_theta(A.ay, g.h);
  return kernels::lattice_energy(c.problem(hex, true), u.values, tx, ty);
}

double energy_F_only(const ComplexField& v, const ScalarField& U, double epsilon) {
  return energy_F(v, U, epsilon);
}

void gauge_transform(ComplexField& u, EdgeField& A, const ScalarField& phi) {
  const Grid& g = *u.grid;
  for (int k = 0; k < g.size(); ++k) {
    const double p = std::isfinite(phi.values[k]) ? phi.values[k] : 0.0;
    u.values[k] *= std::polar(1.0, p);
  }
  auto val = [&](int k) { return std::isfinite(phi.values[k]) ? phi.values[k] : 0.0; };
  for (int k = 0; k < g.size(); ++k) {
    if (g.ex_link[k]) A.ax[k] += (val(k + 1) - val(k)) / g.h;
    if (g.ey_link[k]) A.ay[k] += (val(k + g.nx) - val(k)) / g.h;
  }
}

ScalarField lattice_divergence(const EdgeField& A) {
  const Grid& g = *A.grid;
  ScalarField d(A.grid, 0.0);
  for (int k = 0; k < g.size(); ++k) {
    if (g.ex_link[k]) {
      d.values[k] += A.ax[k] / g.h;
      d.values[k + 1] -= A.ax[k] / g.h;
    }
    if (g.ey_link[k]) {
      d.values[k] += A.ay[k] / g.h;
      d.values[k + g.nx] -= A.ay[k] / g.h;
    }
  }
  return d;
}

ScalarField lattice_curl(const EdgeField& A) {
  const Grid& g = *A.grid;
  ScalarField c(A.grid, std::nan(""));
  for (int k = 0; k < g.size(); ++k)
    if (plaquette_on(g, k)) c.values[k] = (A.ax[k] + A.ay[k + 1] - A.ax[k + g.nx] - A.ay[k]) / g.h;
  return c;
}

CoulombResult coulomb_project(const EdgeField& A, double tolerance) {
  const Grid& g = *A.grid;
  const int N = g.size();
  // nodes touched by link edges
  std::vector<int> cidx(N, -1), nodes;
  auto touch = [&](int k) {
    if (cidx[k] < 0) {
      cidx[k] = static_cast<int>(nodes.size());
      nodes.push_back(k);
    }
  };
  for (int k = 0; k < N; ++k) {
    if (g.ex_link[k]) touch(k), touch(k + 1);
    if (g.ey_link[k]) touch(k), touch(k + g.nx);
  }
  const int n = static_cast<int>(nodes.size());
  CoulombResult out{A, ScalarField(A.grid, 0.0), 0, 0.0};
  if (n == 0) return out;

  // graph Laplacian L phi = D theta, one pinned node per connected component
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> adj(n);
  for (int k = 0; k < N; ++k) {
    if (g.ex_link[k]) adj[cidx[k]].push_back(cidx[k + 1]), adj[cidx[k + 1]].push_back(cidx[k]);
    if (g.ey_link[k]) adj[cidx[k]].push_back(cidx[k + g.nx]), adj[cidx[k + g.nx]].push_back(cidx[k]);
  }
  std::vector<std::uint8_t> pinned(n, 0);
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    pinned[s] = 1;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b : adj[a])
        if (comp[b] < 0) comp[b] = ncomp, stack.push_back(b);
    }
    ++ncomp;
  }
  std::vector<Eigen::Triplet<double>> tr;
  for (int a = 0; a < n; ++a) {
    if (pinned[a]) {
      tr.emplace_back(a, a, 1.0);
      continue;
    }
    tr.emplace_back(a, a, static_cast<double>(adj[a].size()));
    for (int b : adj[a])
      if (!pinned[b]) tr.emplace_back(a, b, -1.0);
  }
  SpMat L(n, n);
  L.setFromTriplets(tr.begin(), tr.end());
  Llt llt(L);
  if (llt.info() != Eigen::Success) throw SolverError("coulomb_project: factorisation failed");

  // theta' = theta + grad phi; D theta' = 0  <=>  L phi = D theta (outflow)
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const double h = g.h;
  for (int k = 0; k < N; ++k) {
    if (g.ex_link[k]) {
      rhs[cidx[k]] += h * A.ax[k];
      rhs[cidx[k + 1]] -= h * A.ax[k];
    }
    if (g.ey_link[k]) {
      rhs[cidx[k]] += h * A.ay[k];
      rhs[cidx[k + g.nx]] -= h * A.ay[k];
    }
  }
  for (int a = 0; a < n; ++a)
    if (pinned[a]) rhs[a] = 0.0;
  Eigen::VectorXd phi = llt.solve(rhs);
  // one step of iterative refinement against the full operator
  for (int it = 0; it < 3; ++it) {
    Eigen::VectorXd r = rhs - L * phi;
    if (r.lpNorm<Eigen::Infinity>() <= tolerance * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) break;
    phi += llt.solve(r);
    out.iterations = it + 1;
  }
  for (int a = 0; a < n; ++a) out.phi.values[nodes[a]] = phi[a];
  for (int k = 0; k < N; ++k) {
    if (g.ex_link[k]) out.A.ax[k] += (out.phi.values[k + 1] - out.phi.values[k]) / h;
    if (g.ey_link[k]) out.A.ay[k] += (out.phi.values[k + g.nx] - out.phi.values[k]) / h;
  }
  const ScalarField div = lattice_divergence(out.A);
  for (int a = 0; a < n; ++a) out.max_divergence = std::max(out.max_divergence, std::abs(div.values[nodes[a]]));
  return out;
}

EdgeField edges_from_stream(const ScalarField& psi) {
  const Grid& g = *psi.grid;
  std::vector<double> p(g.size(), 0.0), tx(g.size()), ty(g.size());
  for (int k = 0; k < g.size(); ++k)
    if (plaquette_on(g, k)) p[k] = psi.values[k];
  theta_of_stream(g, p.data(), tx.data(), ty.data());
  return edges_from_theta(psi.grid, tx, ty);
}

ScalarField stream_from_edges(const EdgeField& A) {
  const Grid& g = *A.grid;
  ScalarField psi(A.grid, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      const int k = g.idx(i, j);
      if (g.ex_link[k]) acc -= g.h * A.ax[k];
      if (plaquette_on(g, k)) psi.values[k] = acc;
    }
  }
  return psi;
}

ScalarField plaquette_samples(const ScalarField& nodal) {
  const Grid& g = *nodal.grid;
  ScalarField out(nodal.grid, 0.0);
  for (int k = 0; k < g.size(); ++k)
    if (plaquette_on(g, k)) {
      const int i = g.col(k), j = g.row(k);
      out.values[k] = 0.25 * (nodal.at(i, j) + nodal.at(i + 1, j) + nodal.at(i, j + 1) + nodal.at(i + 1, j + 1));
    }
  return out;
}

namespace {

// F(v, T psi) and its psi-gradient for fixed v.
struct StreamObjective {
  const Grid& g;
  kernels::LatticeProblem prob;
  std::span<const cplx> v;
  std::vector<double> tx, ty, gx, gy;

  StreamObjective(const Grid& grid, const LatticeCoefficients& c, double hex, std::span<const cplx> vv)
      : g(grid), prob(c.problem(hex, true)), v(vv), tx(grid.size()), ty(grid.size()), gx(grid.size()),
        gy(grid.size()) {}

  double eval(const std::vector<double>& psi, std::vector<double>* grad) {
    theta_of_stream(g, psi.data(), tx.data(), ty.data());
    if (!grad) return kernels::lattice_energy(prob, v, tx, ty).total();
    const double e = kernels::lattice_energy(prob, v, tx, ty, {{}, gx, gy}).total();
    stream_adjoint(g, gx.data(), gy.data(), grad->data());
    return e;
  }

  // Hessian of F in theta restricted to the kinetic part, clipped below at 0.
  void kinetic_curvature(std::vector<double>& kx, std::vector<double>& ky) const {
    const int nx = g.nx;
    for (int k = 0; k < g.size(); ++k) {
      kx[k] = ky[k] = 0.0;
      if (prob.cx[k] != 0.0)
        kx[k] = std::max(0.0, prob.cx[k] * std::real(v[k + 1] * std::conj(v[k]) * std::polar(1.0, -tx[k])));
      if (prob.cy[k] != 0.0)
        ky[k] = std::max(0.0, prob.cy[k] * std::real(v[k + nx] * std::conj(v[k]) * std::polar(1.0, -ty[k])));
    }
  }
};

}  // namespace

namespace {

// T^t diag(kx, ky) T + L diag(w) L / h^2 on plaquette streams.
struct StreamHessian {
  const Grid& g;
  const PlaquetteSpace& space;
  std::vector<double> kx, ky, t1, t2, t3, t4;

  StreamHessian(const Grid& grid, const PlaquetteSpace& sp)
      : g(grid), space(sp), kx(grid.size(), 0.0), ky(grid.size(), 0.0), t1(grid.size()), t2(grid.size()),
        t3(grid.size(), 0.0), t4(grid.size(), 0.0) {}

  void apply(const std::vector<double>& x, std::vector<double>& y) {
    const int N = g.size();
    const double h2 = g.h * g.h;
    theta_of_stream(g, x.data(), t1.data(), t2.data());
    for (int k = 0; k < N; ++k) t1[k] *= kx[k], t2[k] *= ky[k];
    stream_adjoint(g, t1.data(), t2.data(), y.data());
    space.laplace(x.data(), t3.data());
    for (int c : space.cells) t3[c] *= g.plaq_w[c] / h2;
    space.laplace(t3.data(), t4.data());
    for (int c : space.cells) y[c] += t4[c];
  }
};

// Preconditioned CG for H x = b, x starting at 0. Returns iterations.
int stream_pcg(StreamHessian& H, const std::vector<double>& b, std::vector<double>& x, double rel_tol, int max_iter) {
  const int N = H.g.size();
  std::vector<double> r = b, z(N, 0.0), p(N), q(N, 0.0);
  x.assign(N, 0.0);
  H.space.precondition(r.data(), z.data());
  p = z;
  double rz = dot_full(r, z);
  const double rz0 = rz;
  int it = 0;
  for (; it < max_iter && rz > rel_tol * rel_tol * rz0; ++it) {
    H.apply(p, q);
    const double alpha = rz / dot_full(p, q);
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, q, r);
    H.space.precondition(r.data(), z.data());
    const double rz_new = dot_full(r, z);
    kernels::xpby(z, rz_new / rz, p);
    rz = rz_new;
  }
  return it;
}

// bilinear weights of plaquette-centred values at p
std::array<std::pair<int, double>, 4> plaquette_weights(const Grid& g, Point2 p) {
  const double fx = (p.x - g.origin.x) / g.h - 0.5, fy = (p.y - g.origin.y) / g.h - 0.5;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
  const double tx = fx - i, ty = fy - j;
  return {{{g.idx(i, j), (1 - tx) * (1 - ty)},
           {g.idx(i + 1, j), tx * (1 - ty)},
           {g.idx(i, j + 1), (1 - tx) * ty},
           {g.idx(i + 1, j + 1), tx * ty}}};
}

void quadratic_weights(const Grid& g, StreamHessian& H) {
  for (int k = 0; k < g.size(); ++k) {
    H.kx[k] = g.ex_link[k] ? g.ex_w[k] : 0.0;
    H.ky[k] = g.ey_link[k] ? g.ey_w[k] : 0.0;
  }
}

}  // namespace

double plaquette_value(const ScalarField& psi, Point2 p) {
  double s = 0.0;
  for (auto [k, w] : plaquette_weights(*psi.grid, p)) s += w * psi.values[k];
  return s;
}

ScalarField london_stream(GridPtr grid) {
  const Grid& g = *grid;
  PlaquetteSpace space(g);
  StreamHessian H(g, space);
  quadratic_weights(g, H);
  // field part of the gradient at psi = 0 with unit applied field
  std::vector<double> b(g.size(), 0.0), w(g.size(), 0.0), x;
  for (int c : space.cells) w[c] = g.plaq_w[c];
  space.laplace(w.data(), b.data());
  for (double& v : b) v = -v;
  stream_pcg(H, b, x, 1e-13, 1000);
  ScalarField out(grid, 0.0);
  out.values = x;
  return out;
}

ScalarField zeta_stream(const VortexConfig& config, GridPtr grid) {
  const Grid& g = *grid;
  PlaquetteSpace space(g);
  StreamHessian H(g, space);
  quadratic_weights(g, H);
  std::vector<double> b(g.size(), 0.0), x;
  for (std::size_t i = 0; i < config.points.size(); ++i)
    for (auto [k, w] : plaquette_weights(g, config.points[i]))
      if (plaquette_on(g, k)) b[k] -= 2 * std::numbers::pi * config.degrees[i] * w;
  ScalarField out(grid, 0.0);
  if (config.points.empty()) return out;
  stream_pcg(H, b, x, 1e-13, 1000);
  out.values = x;
  return out;
}

ScalarField solve_A_v_stream(const ComplexField& v, const ScalarField& U, double hex, AvReport* report,
                             double tolerance) {
  const Grid& g = *v.grid;
  const int N = g.size();
  const auto coef = coefficients_F(U, 1.0);
  PlaquetteSpace space(g);
  StreamObjective obj(g, coef, hex, v.values);
  StreamHessian H(g, space);

  std::vector<double> psi(N, 0.0), grad(N), step(N), rhs(N), trial(N);
  AvReport rep;
  double E = obj.eval(psi, &grad);
  for (int it = 0; it < 50; ++it) {
    obj.kinetic_curvature(H.kx, H.ky);
    for (int k = 0; k < N; ++k) rhs[k] = -grad[k];
    double gz;
    {
      std::vector<double> z(N, 0.0);
      space.precondition(rhs.data(), z.data());
      gz = dot_full(rhs, z);
    }
    rep.cg_iterations += stream_pcg(H, rhs, step, std::min(1e-4, std::sqrt(std::sqrt(std::abs(gz)))), 500);
    const double dec = -dot_full(grad, step);  // Newton decrement squared
    rep.gradient_norm = std::sqrt(std::max(dec, 0.0));
    if (rep.gradient_norm <= tolerance * std::sqrt(std::max(1.0, std::abs(E)))) {
      rep.converged = true;
      break;
    }
    double t = 1.0, Et = 0.0;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      for (int k = 0; k < N; ++k) trial[k] = psi[k] + t * step[k];
      Et = obj.eval(trial, nullptr);
      if (Et <= E - 1e-4 * t * dec || dec < 1e-14 * std::max(1.0, std::abs(E))) break;
    }
    psi.swap(trial);
    E = obj.eval(psi, &grad);
    ++rep.newton_steps;
  }
  if (report) *report = rep;
  if (!rep.converged) throw SolverError("solve_A_v: Newton did not converge", rep.gradient_norm, rep.newton_steps);
  ScalarField out(v.grid, 0.0);
  out.values = psi;
  return out;
}

EdgeField solve_A_v(const ComplexField& v, const ScalarField& U, double hex, AvReport* report, double tolerance) {
  return edges_from_stream(solve_A_v_stream(v, U, hex, report, tolerance));
}

namespace {

double vortex_profile(double s) {
  static const RadialProfile prof = bbh_profile(20.0, 0.01);
  if (s >= prof.R) return 1.0 - 0.5 / (s * s);
  const double x = s / prof.step;
  const std::size_t i = std::min(static_cast<std::size_t>(x), prof.f.size() - 2);
  const double t = x - static_cast<double>(i);
  return (1 - t) * prof.f[i] + t * prof.f[i + 1];
}

}  // namespace

GLState build_test_configuration(const VortexConfig& config, const LondonData& london, const ScalarField& U,
                                 double epsilon, double hex, const ScalarField* xi0_stream) {
  const GridPtr grid = london.xi0.grid;
  if (!(epsilon > 0.0)) throw ValidationError("test configuration: epsilon must be positive");
  GLState s;
  s.hex = hex;
  s.U = U;
  s.epsilon = epsilon;
  ScalarField psi = xi0_stream ? *xi0_stream : london_stream(grid);
  for (double& x : psi.values) x *= hex;
  if (config.points.empty()) {
    s.v = ComplexField(grid, 1.0);
  } else {
    config.validate(*grid);
    for (int d : config.degrees)
      if (d != 1) throw ValidationError("test configuration: degrees must all be +1");
    for (std::size_t i = 0; i < config.points.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (distance(config.points[i], config.points[j]) < 8.0 * epsilon)
          throw ValidationError("test configuration: vortices closer than 8 epsilon");
    s.v = canonical_phase(config, grid);
    for (int k = 0; k < grid->size(); ++k) {
      double m = 1.0;
      for (const Point2& z : config.points) m *= vortex_profile(distance(grid->pos(k), z) / epsilon);
      s.v.values[k] *= m;
    }
    const ScalarField zeta = zeta_stream(config, grid);
    for (int k = 0; k < grid->size(); ++k) psi.values[k] += zeta.values[k];
  }
  s.A = edges_from_stream(psi);
  return s;
}

namespace {

// Unknowns: Re v, Im v on active nodes, then psi on active plaquettes.
struct FullObjective {
  const Grid& g;
  LatticeCoefficients coef;
  kernels::LatticeProblem prob;
  PlaquetteSpace space;
  std::vector<int> nodes;
  std::vector<double> vdiag;
  std::vector<cplx> v, gv;
  std::vector<double> psi, tx, ty, gx, gy, gpsi, tmp;

  FullObjective(const GLState& s)
      : g(*s.grid()), coef(coefficients_F(s.U, s.epsilon)), prob(coef.problem(s.hex, true)), space(g),
        v(s.v.values), gv(g.size()), psi(g.size(), 0.0), tx(g.size()), ty(g.size()), gx(g.size()), gy(g.size()),
        gpsi(g.size()), tmp(g.size()) {
    for (int k = 0; k < g.size(); ++k)
      if (g.node_active[k]) nodes.push_back(k);
    vdiag.resize(nodes.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const int k = nodes[a];
      double d = 8.0 * coef.pot[k];
      if (coef.cx[k] != 0.0) d += coef.cx[k];
      if (coef.cy[k] != 0.0) d += coef.cy[k];
      if (coef.cx[k - 1] != 0.0) d += coef.cx[k - 1];
      if (coef.cy[k - g.nx] != 0.0) d += coef.cy[k - g.nx];
      vdiag[a] = 1.0 / std::max(d, 1e-12);
    }
  }

  std::size_t nv() const { return nodes.size(); }
  std::size_t size() const { return 2 * nodes.size() + space.cells.size(); }

  void unpack(const std::vector<double>& x) {
    const std::size_t n = nv();
    for (std::size_t a = 0; a < n; ++a) v[nodes[a]] = cplx(x[a], x[n + a]);
    for (std::size_t c = 0; c < space.cells.size(); ++c) psi[space.cells[c]] = x[2 * n + c];
  }
  void pack(std::vector<double>& x) const {
    const std::size_t n = nv();
    x.resize(size());
    for (std::size_t a = 0; a < n; ++a) x[a] = v[nodes[a]].real(), x[n + a] = v[nodes[a]].imag();
    for (std::size_t c = 0; c < space.cells.size(); ++c) x[2 * n + c] = psi[space.cells[c]];
  }

  double eval(const std::vector<double>& x, std::vector<double>* grad) {
    unpack(x);
    theta_of_stream(g, psi.data(), tx.data(), ty.data());
    if (!grad) return kernels::lattice_energy(prob, v, tx, ty).total();
    const double e = kernels::lattice_energy(prob, v, tx, ty, {gv, gx, gy}).total();
    stream_adjoint(g, gx.data(), gy.data(), gpsi.data());
    const std::size_t n = nv();
    grad->resize(size());
    for (std::size_t a = 0; a < n; ++a) (*grad)[a] = gv[nodes[a]].real(), (*grad)[n + a] = gv[nodes[a]].imag();
    for (std::size_t c = 0; c < space.cells.size(); ++c) (*grad)[2 * n + c] = gpsi[space.cells[c]];
    return e;
  }

  void precondition(const std::vector<double>& r, std::vector<double>& z) {
    const std::size_t n = nv();
    z.resize(size());
    for (std::size_t a = 0; a < n; ++a) z[a] = vdiag[a] * r[a], z[n + a] = vdiag[a] * r[n + a];
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t c = 0; c < space.cells.size(); ++c) tmp[space.cells[c]] = r[2 * n + c];
    space.precondition(tmp.data(), gpsi.data());
    for (std::size_t c = 0; c < space.cells.size(); ++c) z[2 * n + c] = gpsi[space.cells[c]];
  }

  double min_abs_v() const {
    double m = INFINITY;
    for (int k : nodes)
      if (g.node_w[k] > 0.0) m = std::min(m, std::abs(v[k]));
    return m;
  }
};

}  // namespace

GLState minimize(const GLState& s0, const MinimizeOptions& opt, MinimizeReport* report) {
  // the stream parametrisation needs a Coulomb-gauge start
  GLState s = s0;
  gauge_transform(s.v, s.A, coulomb_project(s.A).phi);

  FullObjective obj(s);
  obj.psi = stream_from_edges(s.A).values;
  std::vector<double> x, gr, d, xt, gt, z;
  obj.pack(x);
  double E = obj.eval(x, &gr);

  MinimizeReport rep;
  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  int quiet = 0;
  double tau = 1.0;  // flow step
  if (opt.trace) rep.trace.push_back({0, E, obj.min_abs_v()});
  const std::size_t n = x.size();
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    // direction
    if (opt.method == MinimizeOptions::Method::lbfgs) {
      std::vector<double> q = gr, alpha(S.size());
      for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
        alpha[i] = rho[i] * kernels::dot(S[i], q);
        kernels::axpy(-alpha[i], Y[i], q);
      }
      obj.precondition(q, z);
      if (!S.empty()) {
        std::vector<double> hy;
        obj.precondition(Y.back(), hy);
        const double gamma = kernels::dot(S.back(), Y.back()) / kernels::dot(Y.back(), hy);
        for (double& zi : z) zi *= gamma;
      }
      for (std::size_t i = 0; i < S.size(); ++i) {
        const double beta = rho[i] * kernels::dot(Y[i], z);
        kernels::axpy(alpha[i] - beta, S[i], z);
      }
      d.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
      if (kernels::dot(d, gr) >= 0.0) {
        S.clear(), Y.clear(), rho.clear();
        obj.precondition(gr, z);
        for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
      }
    } else {
      obj.precondition(gr, z);
      d.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) d[i] = -tau * z[i];
    }
    const double slope = kernels::dot(d, gr);
    {
      std::vector<double> pg;
      obj.precondition(gr, pg);
      const double pnorm = kernels::dot(pg, gr);
      if (pnorm <= opt.grad_tol * opt.grad_tol * std::max(1.0, std::abs(E))) {
        rep.converged = true;
        break;
      }
    }
    // backtracking
    double t = 1.0, Et = E;
    bool accepted = false;
    xt.resize(n);
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + t * d[i];
      Et = obj.eval(xt, &gt);
      if (Et <= E + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!S.empty()) {
        S.clear(), Y.clear(), rho.clear();
        obj.eval(x, &gr);
        continue;
      }
      rep.stalled = true;
      obj.eval(x, &gr);
      break;
    }
    if (opt.method == MinimizeOptions::Method::flow) tau = t < 1.0 ? tau * t : tau * 1.5;
    std::vector<double> sv(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) sv[i] = xt[i] - x[i], yv[i] = gt[i] - gr[i];
    const double sy = kernels::dot(sv, yv);
    if (opt.method == MinimizeOptions::Method::lbfgs && sy > 1e-16 * kernels::dot(sv, sv)) {
      S.push_back(std::move(sv));
      Y.push_back(std::move(yv));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.memory) S.pop_front(), Y.pop_front(), rho.pop_front();
    }
    const double dec = E - Et;
    x.swap(xt);
    gr.swap(gt);
    E = Et;
    rep.sweeps = sweep;
    if (opt.trace) rep.trace.push_back({sweep, E, obj.min_abs_v()});
    quiet = dec <= opt.rel_decrease * std::abs(E) ? quiet + 1 : 0;
    if (quiet >= opt.patience) {
      rep.converged = true;
      break;
    }
  }
  obj.unpack(x);

  GLState out = s;
  out.v.values = obj.v;
  double vmax = 0.0;
  for (int k : obj.nodes) {
    const double m = std::abs(out.v.values[k]);
    vmax = std::max(vmax, m);
    if (m > 1.0) out.v.values[k] /= m;
  }
  ScalarField psi(s.grid(), 0.0);
  psi.values = obj.psi;
  out.A = edges_from_stream(psi);
  rep.max_abs_v_before_clip = vmax;
  rep.energy = energy_full(out).total();
  if (opt.trace && rep.energy != E) rep.trace.push_back({rep.sweeps, rep.energy, obj.min_abs_v()});
  if (report) *report = std::move(rep);
  return out;
}

DecompositionReport decomposition_check(const GLState& s, const VortexConfig& config, const LondonData& london,
                                        const ScalarField* xi0_stream) {
  const Grid& g = *s.grid();
  DecompositionReport r;
  r.F_full = energy_full(s).total();
  r.hex2_J0 = s.hex * s.hex * london.J0;
  r.F_v = energy_F(s.v, s.U, s.epsilon);

  const ScalarField x0 = xi0_stream ? *xi0_stream : london_stream(s.grid());
  ScalarField zeta = stream_from_edges(s.A);
  for (int k = 0; k < g.size(); ++k) zeta.values[k] = plaquette_on(g, k) ? zeta.values[k] - s.hex * x0.values[k] : 0.0;

  // 1/2 sum w_e theta_e^2 + 1/2 sum w_P h^2 (circulation / h^2)^2
  std::vector<double> tx(g.size()), ty(g.size());
  theta_of_stream(g, zeta.values.data(), tx.data(), ty.data());
  const double h2 = g.h * g.h;
  double q = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    if (g.ex_link[k]) q += 0.5 * g.ex_w[k] * tx[k] * tx[k];
    if (g.ey_link[k]) q += 0.5 * g.ey_w[k] * ty[k] * ty[k];
    if (plaquette_on(g, k)) {
      const double c = (tx[k] + ty[k + 1] - tx[k + g.nx] - ty[k]) / h2;
      q += 0.5 * g.plaq_w[k] * h2 * c * c;
    }
  }
  r.zeta_energy = q;
  for (std::size_t i = 0; i < config.points.size(); ++i) {
    const Point2 a = config.points[i];
    r.point_terms += 2 * std::numbers::pi * config.degrees[i] * (s.hex * plaquette_value(x0, a) + plaquette_value(zeta, a));
  }
  r.rhs = r.F_v + r.point_terms + r.zeta_energy;
  r.residual = r.F_full - r.hex2_J0 - r.rhs;
  r.relative = std::abs(r.residual) / std::max(std::abs(r.F_full), 1e-300);
  return r;
}

DeskLevel prepare_level(const DomainSpec& domain, int n, const PinningSpec& pinning) {
  DeskLevel L;
  L.grid = build_grid(domain, n);
  L.pinning = build_pinning_term(pinning, L.grid);
  L.U = solve_lassoued_mironescu(L.pinning, pinning.epsilon);
  L.london = solve_london(L.grid);
  L.xi0_stream = london_stream(L.grid);
  return L;
}

GLState prolong(const GLState& coarse, const DeskLevel& from, const DeskLevel& fine) {
  const Grid& gc = *coarse.grid();
  const Grid& gf = *fine.grid;
  // extend v off the active coarse nodes so bilinear stencils near the edge see sane values
  ComplexField vc = coarse.v;
  std::vector<std::uint8_t> known(gc.size());
  for (int k = 0; k < gc.size(); ++k) known[k] = gc.node_active[k];
  for (int ring = 0; ring < 3; ++ring) {
    std::vector<std::uint8_t> next = known;
    for (int k = 0; k < gc.size(); ++k) {
      if (known[k]) continue;
      cplx acc = 0.0;
      int cnt = 0;
      const int i = gc.col(k), j = gc.row(k);
      for (int dd = 0; dd < 4; ++dd) {
        const int ii = i + kDx[dd], jj = j + kDy[dd];
        if (gc.in_range(ii, jj) && known[gc.idx(ii, jj)]) acc += vc.values[gc.idx(ii, jj)], ++cnt;
      }
      if (cnt) vc.values[k] = acc / static_cast<double>(cnt), next[k] = 1;
    }
    known.swap(next);
  }
  // only the screening correction zeta is interpolated; the London part is
  // taken on the fine lattice so the boundary layer stays consistent
  ScalarField psic = stream_from_edges(coarse.A);
  for (int k = 0; k < gc.size(); ++k) psic.values[k] -= coarse.hex * from.xi0_stream.values[k];

  GLState s;
  s.hex = coarse.hex;
  s.epsilon = coarse.epsilon;
  s.U = fine.U;
  s.v = ComplexField(fine.grid, 1.0);
  for (int k = 0; k < gf.size(); ++k)
    if (gf.node_active[k]) s.v.values[k] = interpolate(vc, gf.pos(k));
  ScalarField psif(fine.grid, 0.0);
  const Point2 hc{0.5 * gc.h, 0.5 * gc.h}, hf{0.5 * gf.h, 0.5 * gf.h};
  for (int k = 0; k < gf.size(); ++k)
    if (plaquette_on(gf, k))
      psif.values[k] = coarse.hex * fine.xi0_stream.values[k] + interpolate(psic, gf.pos(k) + hf - hc);
  s.A = edges_from_stream(psif);
  return s;
}

}  // namespace glpin
