#include "glpin/bbh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

namespace {

constexpr double kPi = std::numbers::pi;

// f'' = -f'/r + f/r^2 - f(1-f^2), integrated from a series start f ~ a r.
// Returns +1 if f overshoots 1, -1 if it turns back down, 0 if neither.
int shoot(double a, double r_end, std::vector<double>* rs = nullptr, std::vector<double>* fs = nullptr) {
  const double r0 = 1e-3, dr = 1e-3;
  // f = a r - a r^3 / 8 near the origin
  double r = r0, f = a * r0 - a * r0 * r0 * r0 / 8, g = a - 3 * a * r0 * r0 / 8;
  auto rhs = [](double r, double f, double g) { return -g / r + f / (r * r) - f * (1 - f * f); };
  while (r < r_end) {
    if (rs) {
      rs->push_back(r);
      fs->push_back(f);
    }
    const double k1f = g, k1g = rhs(r, f, g);
    const double k2f = g + 0.5 * dr * k1g, k2g = rhs(r + 0.5 * dr, f + 0.5 * dr * k1f, g + 0.5 * dr * k1g);
    const double k3f = g + 0.5 * dr * k2g, k3g = rhs(r + 0.5 * dr, f + 0.5 * dr * k2f, g + 0.5 * dr * k2g);
    const double k4f = g + dr * k3g, k4g = rhs(r + dr, f + dr * k3f, g + dr * k3g);
    f += dr / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    g += dr / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    r += dr;
    if (f > 1.0) return 1;
    if (g < 0.0) return -1;
  }
  return 0;
}

}  // namespace

double shooting_slope(double r_shoot) {
  double lo = 0.3, hi = 1.0;
  if (shoot(lo, r_shoot) != -1 || shoot(hi, r_shoot) != 1)
    throw SolverError("radial profile: shooting slopes do not bracket the solution", 0.0, 0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int s = shoot(mid, r_shoot);
    if (s == 1)
      hi = mid;
    else if (s == -1)
      lo = mid;
    else
      return mid;
  }
  return 0.5 * (lo + hi);
}

RadialProfile bbh_profile(double R, double step) {
  if (!(R > 2.0) || !(step > 0.0) || step > 0.1) throw ValidationError("radial profile needs R > 2 and 0 < step <= 0.1");
  RadialProfile p;
  p.R = R;
  const int n = static_cast<int>(std::ceil(R / step));
  p.step = R / n;
  const double h = p.step;
  p.r.resize(n + 1);
  for (int i = 0; i <= n; ++i) p.r[i] = i * h;

  // Seed: shooting profile where it is trustworthy, far-field expansion beyond.
  const double a = shooting_slope();
  std::vector<double> rs, fs;
  shoot(a, 6.0, &rs, &fs);
  p.f.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = p.r[i];
    double v;
    if (r <= rs.back()) {
      const auto it = std::lower_bound(rs.begin(), rs.end(), r);
      v = it == rs.end() ? fs.back() : (it == rs.begin() ? a * r : fs[it - rs.begin()]);
    } else {
      const double far = 1.0 - 0.5 / (r * r), w = std::min(1.0, (r - rs.back()) / 2.0);
      v = (1 - w) * fs.back() + w * far;
    }
    p.f[i] = std::clamp(v, 0.0, 1.0);
  }
  p.f[0] = 0.0;
  p.f[n] = 1.0;

  // Newton on the discrete energy (midpoint rule per cell).
  auto energy = [&](const std::vector<double>& f) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rm = (i + 0.5) * h, m = 0.5 * (f[i] + f[i + 1]), D = (f[i + 1] - f[i]) / h;
      e += h * (rm * D * D + m * m / rm + 0.5 * rm * (1 - m * m) * (1 - m * m));
    }
    return kPi * e;
  };
  std::vector<double> g(n + 1), dg(n + 1), od(n + 1), x(n + 1), c(n + 1);
  double e = energy(p.f);
  for (int it = 0; it < 100; ++it) {
    std::fill(g.begin(), g.end(), 0.0);
    std::fill(dg.begin(), dg.end(), 0.0);
    std::fill(od.begin(), od.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double rm = (i + 0.5) * h, m = 0.5 * (p.f[i] + p.f[i + 1]), D = (p.f[i + 1] - p.f[i]) / h;
      const double s1 = 2 * m / rm - 2 * rm * m * (1 - m * m);
      const double s2 = 2 / rm - 2 * rm * (1 - 3 * m * m);
      g[i] += -2 * rm * D + 0.5 * h * s1;
      g[i + 1] += 2 * rm * D + 0.5 * h * s1;
      const double diag = 2 * rm / h + 0.25 * h * s2, off = -2 * rm / h + 0.25 * h * s2;
      dg[i] += diag;
      dg[i + 1] += diag;
      od[i] += off;  // couples i and i+1
    }
    double gn = 0.0;
    for (int i = 1; i < n; ++i) gn = std::max(gn, std::abs(g[i]));
    if (gn < 1e-10) break;  // rounding floor is about 1e-11
    // Thomas on unknowns 1..n-1; fall back to a gradient step if not SPD.
    bool spd = true;
    for (int i = 1; i < n; ++i) {
      const double den = dg[i] - (i > 1 ? od[i - 1] * c[i - 1] : 0.0);
      if (!(den > 0.0)) {
        spd = false;
        break;
      }
      c[i] = od[i] / den;
      x[i] = (-g[i] - (i > 1 ? od[i - 1] * x[i - 1] : 0.0)) / den;
    }
    if (!spd)
      for (int i = 1; i < n; ++i) x[i] = -g[i] / std::max(dg[i], 1e-12);
    else
      for (int i = n - 2; i >= 1; --i) x[i] -= c[i] * x[i + 1];
    double step_max = 0.0;
    for (int i = 1; i < n; ++i) step_max = std::max(step_max, std::abs(x[i]));
    if (spd && step_max < 1e-10) break;
    double t = 1.0;
    std::vector<double> trial = p.f;
    for (; t > 1e-10; t *= 0.5) {
      for (int i = 1; i < n; ++i) trial[i] = p.f[i] + t * x[i];
      const double et = energy(trial);
      if (et <= e) {
        e = et;
        break;
      }
    }
    if (t <= 1e-10) break;
    p.f.swap(trial);
    ++p.newton_steps;
  }
  p.energy = e;
  p.slope_at_origin = p.f[1] / h;
  return p;
}

BbhGamma bbh_gamma(double step) {
  BbhGamma out;
  out.radii = {50.0, 100.0, 200.0};
  for (double R : out.radii) out.remainders.push_back(bbh_profile(R, step).energy - kPi * std::log(R));
  // The remainder converges like R^-2.
  const double r1 = out.remainders[1], r2 = out.remainders[2];
  out.error = std::abs(r2 - r1) / 3.0;
  out.gamma = r2 - (r1 - r2) / 3.0;
  return out;
}

}  // namespace glpin
