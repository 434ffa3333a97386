#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "glpin/errors.hpp"
#include "glpin/kernels.hpp"
#include "glpin/renorm.hpp"

namespace glpin {

namespace {

constexpr double kPi = std::numbers::pi;

// Radii (seen from x0) between which the inclusion boundary lies.
std::pair<double, double> boundary_radii(const DomainSpec& omega, Point2 x0) {
  const int m = 4096;
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * kPi * k / m;
    const double by = omega.shape == Shape::disk ? omega.a : omega.b;
    const Point2 p = omega.center + Point2{omega.a * std::cos(t), by * std::sin(t)};
    const double r = distance(p, x0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double pad = 2e-3 * omega.diameter();
  return {std::max(lo - pad, 0.0), hi + pad};
}

// Preconditioner: the operator with ring-averaged conductances. It commutes
// with rotations, so each angular Fourier mode is a tridiagonal solve in s.
class RingPreconditioner {
 public:
  RingPreconditioner(const std::vector<double>& cs, const std::vector<double>& ct, int ns, int nt)
      : ns_(ns), nt_(nt), nm_(nt / 2 + 1), rings_(ns - 1) {
    std::vector<double> as(ns, 0.0), at(ns, 0.0);
    for (int j = 0; j < ns; ++j)
      for (int k = 0; k < nt; ++k) {
        as[j] += cs[j * nt + k] / nt;
        at[j] += ct[j * nt + k] / nt;
      }
    lower_.assign(rings_, 0.0);
    diag_.assign(static_cast<std::size_t>(rings_) * nm_, 0.0);
    for (int r = 0; r < rings_; ++r) {
      const int j = r + 1;
      lower_[r] = as[j];  // coupling between rings j and j+1
      for (int m = 0; m < nm_; ++m)
        diag_[r * nm_ + m] = as[j - 1] + as[j] + at[j] * (2.0 - 2.0 * std::cos(2.0 * kPi * m / nt));
    }
    real_.resize(static_cast<std::size_t>(rings_) * nt);
    spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * rings_ * nm_));
    int n[] = {nt};
#pragma omp critical(glpin_fftw_plan)
    {
      fwd_ = fftw_plan_many_dft_r2c(1, n, rings_, real_.data(), nullptr, 1, nt, spec_, nullptr, 1, nm_,
                                    FFTW_ESTIMATE);
      bwd_ = fftw_plan_many_dft_c2r(1, n, rings_, spec_, nullptr, 1, nm_, real_.data(), nullptr, 1, nt,
                                    FFTW_ESTIMATE);
    }
  }
  ~RingPreconditioner() {
#pragma omp critical(glpin_fftw_plan)
    {
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(bwd_);
    }
    fftw_free(spec_);
  }
  RingPreconditioner(const RingPreconditioner&) = delete;
  RingPreconditioner& operator=(const RingPreconditioner&) = delete;

  void apply(std::span<const double> r, std::span<double> z) {
    std::copy(r.begin(), r.end(), real_.begin());
    fftw_execute(fwd_);
    std::vector<double> c(rings_), d(rings_);
    for (int m = 0; m < nm_; ++m)
      for (int part = 0; part < 2; ++part) {
        // Thomas: -lower[r-1] u[r-1] + diag u[r] - lower[r] u[r+1] = f[r]
        for (int q = 0; q < rings_; ++q) {
          const double f = spec_[q * nm_ + m][part];
          const double off = q > 0 ? lower_[q - 1] : 0.0;
          const double den = diag_[q * nm_ + m] + (q > 0 ? off * c[q - 1] : 0.0);
          c[q] = -lower_[q] / den;
          d[q] = (f + (q > 0 ? off * d[q - 1] : 0.0)) / den;
        }
        for (int q = rings_ - 1; q >= 0; --q) {
          if (q < rings_ - 1) d[q] -= c[q] * d[q + 1];
          spec_[q * nm_ + m][part] = d[q];
        }
      }
    fftw_execute(bwd_);
    const double scale = 1.0 / nt_;
    for (std::size_t q = 0; q < z.size(); ++q) z[q] = real_[q] * scale;
  }

 private:
  int ns_, nt_, nm_, rings_;
  std::vector<double> lower_, diag_, real_;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

template <class Apply>
CgResult fourier_pcg(const Apply& apply, const std::vector<double>& cs, const std::vector<double>& ct, int ns,
                     int nt, const std::vector<double>& b, std::vector<double>& x) {
  RingPreconditioner M(cs, ct, ns, nt);
  const std::size_t n = x.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double bn = std::sqrt(kernels::dot_serial(b, b));
  CgResult res;
  double rn = std::sqrt(kernels::dot_serial(r, r));
  M.apply(r, z);
  p = z;
  double rz = kernels::dot_serial(r, z);
  const int max_iter = 2000;
  while (rn > 1e-12 * bn && res.iterations < max_iter) {
    apply(p, q);
    const double alpha = rz / kernels::dot_serial(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rn = std::sqrt(kernels::dot_serial(r, r));
    M.apply(r, z);
    const double rz1 = kernels::dot_serial(r, z);
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + (rz1 / rz) * p[i];
    rz = rz1;
    ++res.iterations;
  }
  res.relative_residual = rn / bn;
  res.converged = rn <= 1e-12 * bn;
  return res;
}

// Conjugate energy E1 = 1/2 int a^-2 |grad psi|^2 with psi = 1 on the inner
// circle and 0 on the outer one, on a log-polar grid with square cells.
struct PolarSolve {
  double E1 = 0.0;
  int iterations = 0;
};

PolarSolve polar_capacity(Point2 x0, const PinningSpec& spec, double Rhat, double rhat, int n_theta) {
  const DomainSpec& omega = spec.omega;
  const double kin = 1.0 / (spec.b * spec.b);
  const double s0 = std::log(rhat), s1 = std::log(Rhat);
  const double dt = 2.0 * kPi / n_theta;
  const int ns = std::max(4, static_cast<int>(std::ceil((s1 - s0) / dt)));
  const double ds = (s1 - s0) / ns;
  const auto [rin, rout] = boundary_radii(omega, x0);

  auto kappa = [&](double s, double t) {
    return omega.contains(x0 + Point2{std::cos(t), std::sin(t)} * std::exp(s)) ? kin : 1.0;
  };
  // Harmonic mean along the face normal of tangential arithmetic means.
  constexpr int kNormal = 16, kTang = 4;
  auto face = [&](double sa, double sb, double ta, double tb, bool normal_is_s) {
    const bool all_in = std::exp(std::max(sa, sb)) < rin;
    const bool all_out = std::exp(std::min(sa, sb)) > rout;
    if (all_in) return kin;
    if (all_out) return 1.0;
    double res = 0.0;
    for (int a = 0; a < kNormal; ++a) {
      double mean = 0.0;
      for (int b = 0; b < kTang; ++b) {
        const double un = (a + 0.5) / kNormal, ut = (b + 0.5) / kTang;
        mean += normal_is_s ? kappa(sa + un * (sb - sa), ta + ut * (tb - ta))
                            : kappa(sa + ut * (sb - sa), ta + un * (tb - ta));
      }
      res += kTang / mean;
    }
    return kNormal / res;
  };

  // cs[j*nt+k]: face between rings j and j+1 at angle k; ct[j*nt+k]: face
  // between angles k and k+1 on ring j.
  const int nt = n_theta;
  std::vector<double> cs(static_cast<std::size_t>(ns) * nt), ct(static_cast<std::size_t>(ns + 1) * nt, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ns; ++j)
    for (int k = 0; k < nt; ++k) {
      const double sa = s0 + j * ds, t = k * dt;
      cs[j * nt + k] = face(sa, sa + ds, t - 0.5 * dt, t + 0.5 * dt, true) * (dt / ds);
    }
#pragma omp parallel for schedule(static)
  for (int j = 1; j < ns; ++j)
    for (int k = 0; k < nt; ++k) {
      const double s = s0 + j * ds, t = k * dt;
      ct[j * nt + k] = face(s - 0.5 * ds, s + 0.5 * ds, t, t + dt, false) * (ds / dt);
    }

  // Unknowns: rings 1..ns-1. Ring 0 is 1, ring ns is 0.
  const int nu = (ns - 1) * nt;
  auto id = [nt](int j, int k) { return (j - 1) * nt + k; };
  std::vector<double> diag(nu), b(nu, 0.0), x(nu);
  for (int j = 1; j < ns; ++j)
    for (int k = 0; k < nt; ++k) {
      const int km = (k + nt - 1) % nt;
      diag[id(j, k)] = cs[(j - 1) * nt + k] + cs[j * nt + k] + ct[j * nt + k] + ct[j * nt + km];
      if (j == 1) b[id(j, k)] = cs[k];
    }
  // Start from the 1-D solution with ring-averaged resistances.
  std::vector<double> res(ns), cum(ns + 1, 0.0);
  for (int j = 0; j < ns; ++j) {
    double c = 0.0;
    for (int k = 0; k < nt; ++k) c += cs[j * nt + k];
    cum[j + 1] = cum[j] + 1.0 / c;
  }
  for (int j = 1; j < ns; ++j)
    for (int k = 0; k < nt; ++k) x[id(j, k)] = 1.0 - cum[j] / cum[ns];

  auto apply = [&](std::span<const double> u, std::span<double> out) {
#pragma omp parallel for schedule(static)
    for (int j = 1; j < ns; ++j)
      for (int k = 0; k < nt; ++k) {
        const int kp = (k + 1) % nt, km = (k + nt - 1) % nt;
        const int q = id(j, k);
        double v = diag[q] * u[q] - ct[j * nt + k] * u[id(j, kp)] - ct[j * nt + km] * u[id(j, km)];
        if (j > 1) v -= cs[(j - 1) * nt + k] * u[id(j - 1, k)];
        if (j < ns - 1) v -= cs[j * nt + k] * u[id(j + 1, k)];
        out[q] = v;
      }
  };
  const CgResult cg = fourier_pcg(apply, cs, ct, ns, nt, b, x);
  if (!cg.converged) throw SolverError("micro capacity solve did not converge", cg.relative_residual, cg.iterations);

  auto psi = [&](int j, int k) { return j == 0 ? 1.0 : (j == ns ? 0.0 : x[id(j, k)]); };
  double E = 0.0;
  for (int j = 0; j < ns; ++j)
    for (int k = 0; k < nt; ++k) {
      const double d = psi(j + 1, k) - psi(j, k);
      E += cs[j * nt + k] * d * d;
      if (j > 0) {
        const double e = psi(j, (k + 1) % nt) - psi(j, k);
        E += ct[j * nt + k] * e * e;
      }
    }
  return {0.5 * E, cg.iterations};
}

double remainder(double E1, double b, double Rhat, double rhat) {
  return kPi * kPi / E1 - kPi * std::log(Rhat) - b * b * kPi * std::log(1.0 / rhat);
}

void validate_micro(const PinningSpec& spec) {
  // b = 1 is accepted here as the no-contrast reference.
  PinningSpec probe = spec;
  if (spec.b == 1.0) probe.b = 0.5;
  probe.validate();
}

}  // namespace

MicroResult w_micro_detail(Point2 x0, const PinningSpec& spec, const MicroOptions& opt) {
  validate_micro(spec);
  if (!spec.omega.contains(x0)) throw ValidationError("micro point must lie inside the inclusion");
  if (!(opt.rhat > 0.0) || !(opt.Rhat > 1.0) || opt.rhat >= -spec.omega.level(x0))
    throw ValidationError("need 0 < rhat < dist(x0, boundary of omega) and Rhat > 1");
  if (opt.n_theta < 16) throw ValidationError("micro angular resolution must be at least 16");
  MicroResult r;
  const PolarSolve a = polar_capacity(x0, spec, opt.Rhat, opt.rhat, opt.n_theta);
  const PolarSolve b = polar_capacity(x0, spec, 2.0 * opt.Rhat, 0.5 * opt.rhat, opt.n_theta);
  r.coarse = remainder(a.E1, spec.b, opt.Rhat, opt.rhat);
  r.fine = remainder(b.E1, spec.b, 2.0 * opt.Rhat, 0.5 * opt.rhat);
  // The outer truncation error decays like Rhat^-2.
  r.value = r.fine + (r.fine - r.coarse) / 3.0;
  r.cg_iterations = a.iterations + b.iterations;
  return r;
}

double w_micro(Point2 x0, const PinningSpec& spec, const MicroOptions& opt) {
  return w_micro_detail(x0, spec, opt).value;
}

MicroMinimum minimize_w_micro(const PinningSpec& spec, const MicroOptions& opt, int search) {
  validate_micro(spec);
  if (search < 3) throw ValidationError("micro search grid needs at least 3 points per axis");
  if (search % 2 == 0) ++search;  // keep the centre on the grid
  const DomainSpec& omega = spec.omega;
  const Box bb = omega.bbox();
  const double step = std::max(bb.hi.x - bb.lo.x, bb.hi.y - bb.lo.y) / search;
  const int half = search / 2;
  const double margin = std::max(2.0 * opt.rhat, 1e-3 * omega.diameter());

  std::vector<Point2> cand;
  for (int j = -half; j <= half; ++j)
    for (int i = -half; i <= half; ++i) {
      const Point2 p = omega.center + Point2{i * step, j * step};
      if (omega.level(p) < -margin) cand.push_back(p);
    }
  std::vector<double> val(cand.size());
#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < static_cast<int>(cand.size()); ++q) val[q] = w_micro(cand[q], spec, opt);

  MicroMinimum out;
  out.search_step = step;
  for (std::size_t q = 0; q < cand.size(); ++q) out.probes.emplace_back(cand[q], val[q]);
  const auto best = std::min_element(val.begin(), val.end()) - val.begin();
  out.x0 = cand[best];
  out.value = val[best];

  // Quadratic fit on the 3x3 neighbourhood of the best probe.
  auto lookup = [&](Point2 p) {
    for (const auto& [c, v] : out.probes)
      if (distance(c, p) < 1e-12 * (1.0 + step)) return v;
    if (!(omega.level(p) < -margin)) return std::numeric_limits<double>::quiet_NaN();
    const double v = w_micro(p, spec, opt);
    out.probes.emplace_back(p, v);
    return v;
  };
  double f[3][3];
  bool ok = true;
  for (int j = -1; j <= 1; ++j)
    for (int i = -1; i <= 1; ++i) {
      f[i + 1][j + 1] = lookup(out.x0 + Point2{i * step, j * step});
      ok = ok && std::isfinite(f[i + 1][j + 1]);
    }
  if (ok) {
    const double gx = (f[2][1] - f[0][1]) / (2 * step), gy = (f[1][2] - f[1][0]) / (2 * step);
    const double hxx = (f[2][1] - 2 * f[1][1] + f[0][1]) / (step * step);
    const double hyy = (f[1][2] - 2 * f[1][1] + f[1][0]) / (step * step);
    const double hxy = (f[2][2] - f[2][0] - f[0][2] + f[0][0]) / (4 * step * step);
    const double det = hxx * hyy - hxy * hxy;
    if (hxx > 0 && det > 0) {
      Point2 d{-(hyy * gx - hxy * gy) / det, -(hxx * gy - hxy * gx) / det};
      const double len = norm(d);
      if (len > step) d = d * (step / len);
      if (len > 1e-12 * step) {
        const Point2 p = out.x0 + d;
        if (omega.level(p) < -margin) {
          const double v = w_micro(p, spec, opt);
          out.probes.emplace_back(p, v);
          if (v < out.value) {
            out.x0 = p;
            out.value = v;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace glpin
