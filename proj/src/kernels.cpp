#include "glpin/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace glpin::kernels {

namespace {

constexpr std::ptrdiff_t kBlock = 8192;

int init_threads() {
  if (const char* env = std::getenv("GLPIN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

int& threads() {
  static int n = init_threads();
  return n;
}

template <class F>
double blocked_sum(std::ptrdiff_t n, F&& term) {
  const std::ptrdiff_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> part(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::ptrdiff_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += term(i);
    part[b] = s;
  }
  double s = 0.0;
  for (double p : part) s += p;
  return s;
}

}  // namespace

int thread_count() { return threads(); }

void set_thread_count(int n) {
  threads() = std::max(1, n);
  omp_set_num_threads(threads());
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(static_cast<std::ptrdiff_t>(a.size()), [&](std::ptrdiff_t i) { return a[i] * b[i]; });
}

double dot_serial(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for reduction(max : m) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_serial(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void apply(const Stencil5& s, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s.diag.size());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t u = 0; u < n; ++u) {
    const int* nb = s.nbr.data() + 4 * u;
    double acc = s.diag[u] * x[u];
    for (int d = 0; d < 4; ++d)
      if (nb[d] >= 0) acc -= x[nb[d]];
    y[u] = acc;
  }
}

void apply_serial(const Stencil5& s, std::span<const double> x, std::span<double> y) {
  for (std::size_t u = 0; u < s.diag.size(); ++u) {
    double acc = s.diag[u] * x[u];
    for (int d = 0; d < 4; ++d) {
      const int q = s.nbr[4 * u + d];
      if (q >= 0) acc -= x[q];
    }
    y[u] = acc;
  }
}

namespace {

inline double theta_at(std::span<const double> t, int k) { return t.empty() ? 0.0 : t[k]; }

}  // namespace

LatticeTerms lattice_energy(const LatticeProblem& p, std::span<const cplx> v, std::span<const double> tx,
                            std::span<const double> ty, LatticeGradient grad) {
  const int nx = p.nx, ny = p.ny, N = nx * ny;
  const bool field = !tx.empty() && !p.plaq_w.empty();
  const double h2 = p.h * p.h;

  // pass 1: edge differences d = v_j e^{-i t} - v_i, rotations e^{i t}, plaquette residuals
  std::vector<cplx> dx(N), dy(N), rx(N), ry(N);
  std::vector<double> res(field ? N : 0);
  std::vector<double> ekin(ny), epot(ny), efld(ny);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int j = 0; j < ny; ++j) {
    double sk = 0.0, sp = 0.0, sf = 0.0;
    for (int i = 0; i < nx; ++i) {
      const int k = j * nx + i;
      if (i + 1 < nx && p.cx[k] != 0.0) {
        const double t = theta_at(tx, k);
        const cplx e(std::cos(t), std::sin(t));
        rx[k] = e;
        dx[k] = v[k + 1] * std::conj(e) - v[k];
        sk += 0.5 * p.cx[k] * std::norm(dx[k]);
      }
      if (j + 1 < ny && p.cy[k] != 0.0) {
        const double t = theta_at(ty, k);
        const cplx e(std::cos(t), std::sin(t));
        ry[k] = e;
        dy[k] = v[k + nx] * std::conj(e) - v[k];
        sk += 0.5 * p.cy[k] * std::norm(dy[k]);
      }
      if (p.pot[k] != 0.0) {
        const double r = p.target[k] - std::norm(v[k]);
        sp += p.pot[k] * r * r;
      }
      if (field && i + 1 < nx && j + 1 < ny && p.plaq_w[k] > 0.0) {
        const double c = (tx[k] + ty[k + 1] - tx[k + nx] - ty[k]) / h2 - p.hex;
        res[k] = p.plaq_w[k] * c;
        sf += 0.5 * p.plaq_w[k] * h2 * c * c;
      }
    }
    ekin[j] = sk;
    epot[j] = sp;
    efld[j] = sf;
  }
  LatticeTerms out;
  for (int j = 0; j < ny; ++j) {
    out.kinetic += ekin[j];
    out.potential += epot[j];
    out.field += efld[j];
  }
  if (grad.v.empty() && grad.tx.empty()) return out;

  // pass 2: gather gradients
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = j * nx + i;
      if (!grad.v.empty()) {
        cplx g = 0.0;
        if (i + 1 < nx && p.cx[k] != 0.0) g -= p.cx[k] * dx[k];
        if (i > 0 && p.cx[k - 1] != 0.0) g += p.cx[k - 1] * dx[k - 1] * rx[k - 1];
        if (j + 1 < ny && p.cy[k] != 0.0) g -= p.cy[k] * dy[k];
        if (j > 0 && p.cy[k - nx] != 0.0) g += p.cy[k - nx] * dy[k - nx] * ry[k - nx];
        if (p.pot[k] != 0.0) g -= 4.0 * p.pot[k] * (p.target[k] - std::norm(v[k])) * v[k];
        grad.v[k] = g;
      }
      if (!grad.tx.empty()) {
        double gx = 0.0, gy = 0.0;
        if (i + 1 < nx) {
          if (p.cx[k] != 0.0) gx += p.cx[k] * std::imag(std::conj(dx[k]) * v[k + 1] * std::conj(rx[k]));
          if (field) {
            if (j + 1 < ny) gx += res[k];
            if (j > 0) gx -= res[k - nx];
          }
        }
        if (j + 1 < ny) {
          if (p.cy[k] != 0.0) gy += p.cy[k] * std::imag(std::conj(dy[k]) * v[k + nx] * std::conj(ry[k]));
          if (field) {
            if (i + 1 < nx) gy -= res[k];
            if (i > 0) gy += res[k - 1];
          }
        }
        grad.tx[k] = gx;
        grad.ty[k] = gy;
      }
    }
  }
  return out;
}

LatticeTerms lattice_energy_serial(const LatticeProblem& p, std::span<const cplx> v, std::span<const double> tx,
                                   std::span<const double> ty, LatticeGradient grad) {
  const int nx = p.nx, ny = p.ny, N = nx * ny;
  const bool field = !tx.empty() && !p.plaq_w.empty();
  const double h2 = p.h * p.h;
  const bool gv = !grad.v.empty(), gt = !grad.tx.empty();
  if (gv) std::fill(grad.v.begin(), grad.v.end(), cplx(0.0));
  if (gt) {
    std::fill(grad.tx.begin(), grad.tx.end(), 0.0);
    std::fill(grad.ty.begin(), grad.ty.end(), 0.0);
  }
  LatticeTerms out;
  auto edge = [&](int a, int b, double c, double t, double* gtheta) {
    const cplx e = std::polar(1.0, -t);
    const cplx d = v[b] * e - v[a];
    out.kinetic += 0.5 * c * std::norm(d);
    if (gv) {
      grad.v[a] -= c * d;
      grad.v[b] += c * d * std::conj(e);
    }
    if (gt) *gtheta += c * std::imag(std::conj(d) * v[b] * e);
  };
  for (int k = 0; k < N; ++k) {
    const int i = k % nx, j = k / nx;
    if (i + 1 < nx && p.cx[k] != 0.0) edge(k, k + 1, p.cx[k], theta_at(tx, k), gt ? &grad.tx[k] : nullptr);
    if (j + 1 < ny && p.cy[k] != 0.0) edge(k, k + nx, p.cy[k], theta_at(ty, k), gt ? &grad.ty[k] : nullptr);
    if (p.pot[k] != 0.0) {
      const double r = p.target[k] - std::norm(v[k]);
      out.potential += p.pot[k] * r * r;
      if (gv) grad.v[k] -= 4.0 * p.pot[k] * r * v[k];
    }
    if (field && i + 1 < nx && j + 1 < ny && p.plaq_w[k] > 0.0) {
      const double c = (tx[k] + ty[k + 1] - tx[k + nx] - ty[k]) / h2 - p.hex;
      out.field += 0.5 * p.plaq_w[k] * h2 * c * c;
      if (gt) {
        const double r = p.plaq_w[k] * c;
        grad.tx[k] += r;
        grad.ty[k + 1] += r;
        grad.tx[k + nx] -= r;
        grad.ty[k] -= r;
      }
    }
  }
  return out;
}

}  // namespace glpin::kernels
