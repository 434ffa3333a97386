#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "glpin/errors.hpp"
#include "glpin/london.hpp"
#include "oracles.hpp"

using namespace glpin;
using std::numbers::pi;

namespace {

// J0 on the unit disk by Simpson quadrature of the radial Bessel solution.
double disk_J0_oracle() {
  const int m = 2000;
  const double i01 = oracle::bessel_i0(1.0);
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double r = static_cast<double>(i) / m;
    const double g = oracle::bessel_i1(r) / i01, xi = oracle::disk_xi0(r);
    const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
    s += w * (g * g + xi * xi) * r;
  }
  s *= 1.0 / (3.0 * m);
  return 0.5 * 2 * pi * s;
}

const LondonData& disk256() {
  static const LondonData d = solve_london(build_grid(DomainSpec::disk(1.0), 256));
  return d;
}

}  // namespace

TEST_CASE("London solution on the unit disk") {
  const auto t0 = std::chrono::steady_clock::now();
  const LondonData& d = disk256();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(std::abs(interpolate(d.xi0, {0, 0}) - oracle::disk_xi0(0.0)) < 1e-3);
  CHECK(london_identity_residual(d) <= 1e-8);
  CHECK(std::abs(d.xi0_inf_norm - 0.21015) < 1e-3);
  CHECK(std::abs(d.M_omega - 1.3204) < 1e-2);
  CHECK(d.M_omega == doctest::Approx(2 * pi * d.xi0_inf_norm));
  CHECK(secs < 30.0);
  for (int k : d.xi0.grid->interior_nodes) {
    CHECK(d.xi0[k] < 0.0);
    CHECK(d.xi0[k] > -1.0);
  }
}

TEST_CASE("xi0 vanishes on the boundary") {
  auto g = build_grid(DomainSpec::rectangle(1.0, 1.0, {0.5, 0.5}), 64);
  auto d = solve_london(g);
  for (const auto& b : g->boundary_nodes) CHECK(d.xi0[b.node] == 0.0);
  auto gd = disk256().xi0.grid;
  const auto& xi = disk256().xi0;
  for (int u = 0; u < gd->interior_count(); ++u)
    for (int dir = 0; dir < 4; ++dir) {
      const double t = gd->cuts[u].theta[dir];
      if (t >= 1.0 || t < 0.25) continue;
      const int k = gd->interior_nodes[u];
      const int q = k + kDx[dir] + kDy[dir] * gd->nx;
      CHECK(std::abs(xi[k] + t * (xi[q] - xi[k])) < 1e-5);
    }
}

TEST_CASE("Lambda on the unit disk is the centre with isotropic Hessian") {
  const LondonData& d = disk256();
  REQUIRE(d.lambda_set.size() == 1);
  CHECK(norm(d.lambda_set[0]) < 1e-9);
  const Sym2& H = d.hessians[0];
  const double expected = 0.5 / oracle::bessel_i0(1.0);
  CHECK(std::abs(H.xx - expected) < 2e-3);
  CHECK(std::abs(H.yy - expected) < 2e-3);
  CHECK(std::abs(H.xy) < 1e-6);
}

TEST_CASE("Lambda on an ellipse is the centre, flatter along the major axis") {
  auto d = solve_london(build_grid(DomainSpec::ellipse(2.0, 1.0), 192));
  REQUIRE(d.lambda_set.size() == 1);
  CHECK(norm(d.lambda_set[0]) < 1e-6);
  const Sym2& H = d.hessians[0];
  CHECK(std::abs(H.xy) < 1e-6);
  CHECK(H.xx < 0.8 * H.yy);
  const Point2 ax = H.major_axis();
  CHECK(std::abs(ax.y) > 0.999);  // largest curvature across the major axis
}

TEST_CASE("synthetic two-well xi0 gives two minima") {
  auto g = build_grid(DomainSpec::disk(1.0), 128);
  SyntheticXi0 s{{{-0.4, 0.0}, {0.4, 0.0}}, 0.2, 0.5};
  auto d = london_from_xi0(sample_synthetic(g, s));
  REQUIRE(d.lambda_set.size() == 2);
  CHECK(distance(d.lambda_set[0], {-0.4, 0.0}) < g->h);
  CHECK(distance(d.lambda_set[1], {0.4, 0.0}) < g->h);
  CHECK(d.xi0_inf_norm == doctest::Approx(0.2).epsilon(1e-4));
  CHECK(d.hessians[0].xx == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("degenerate minima are rejected") {
  auto g = build_grid(DomainSpec::disk(1.0), 64);
  auto xi = ScalarField::sample(g, [](Point2 p) { return -0.2 + p.y * p.y; });
  CHECK_THROWS_AS(find_lambda(xi), NonDegeneracyError);
}

TEST_CASE("J0") {
  auto g = build_grid(DomainSpec::disk(1.0), 128);
  CHECK(compute_J0(ScalarField(g, 0.0)) == 0.0);
  auto d128 = solve_london(g);
  const double j256 = disk256().J0;
  CHECK(std::abs(d128.J0 - j256) < 1e-3);
  CHECK(std::abs(j256 - disk_J0_oracle()) / disk_J0_oracle() < 1e-3);
  ScalarField two = d128.xi0;
  for (double& v : two.values) v *= 2;
  CHECK(compute_J0(two) == doctest::Approx(4 * d128.J0).epsilon(1e-12));
}

TEST_CASE("zeta sign, linearity and superposition") {
  auto g = build_grid(DomainSpec::disk(1.0), 128);
  auto z1 = solve_zeta({{0, 0}}, {1}, g);
  for (int k : g->interior_nodes) CHECK(z1[k] <= 1e-6);
  auto z2 = solve_zeta({{0, 0}}, {2}, g);
  double err = 0.0, sc = 0.0;
  for (int k : g->interior_nodes) {
    err = std::max(err, std::abs(z2[k] - 2 * z1[k]));
    sc = std::max(sc, std::abs(z2[k]));
  }
  CHECK(err / sc < 1e-9);
  const Point2 a{0.3, -0.2}, b{-0.25, 0.4};
  auto zab = solve_zeta({a, b}, {1, -2}, g);
  auto za = solve_zeta({a}, {1}, g), zb = solve_zeta({b}, {1}, g);
  err = 0.0;
  for (int k : g->interior_nodes) err = std::max(err, std::abs(zab[k] - za[k] + 2 * zb[k]));
  CHECK(err / sc < 1e-9);
  CHECK_THROWS_AS(solve_zeta({{1.0, 0.0}}, {1}, g), ValidationError);
}

TEST_CASE("Green symmetry") {
  auto g = build_grid(DomainSpec::disk(1.0), 128);
  const std::vector<std::pair<Point2, Point2>> pairs = {
      {{0.1, 0.2}, {-0.4, 0.3}}, {{0.5, 0.0}, {0.0, -0.5}}, {{0.33, 0.41}, {0.3, -0.52}},
      {{-0.7, 0.1}, {0.2, 0.2}}, {{0.05, -0.6}, {0.6, 0.45}}};
  for (const auto& [a, b] : pairs) {
    const double ab = interpolate(solve_zeta({a}, {1}, g), b);
    const double ba = interpolate(solve_zeta({b}, {1}, g), a);
    CHECK(std::abs(ab - ba) <= 0.01 * std::abs(ab));
  }
}

TEST_CASE("tilde V") {
  auto g = build_grid(DomainSpec::disk(1.0), 256);
  CHECK(tilde_V_general(ScalarField(g, 0.0), {}, {}) == 0.0);
  auto z = solve_zeta({{0, 0}}, {1}, g);
  const TildeV v = tilde_V(z, {{0, 0}}, {1});
  CHECK(v.at_min < 0.0);
  CHECK(std::abs(v.general - v.at_min) <= 0.02 * std::abs(v.at_min));
  // minimality against perturbations compatible with the boundary conditions
  for (double t : {-0.05, 0.05, 0.2}) {
    ScalarField zp = z;
    for (int k = 0; k < g->size(); ++k) {
      const Point2 p = g->pos(k);
      const double r2 = p.x * p.x + p.y * p.y;
      zp.values[k] += t * std::pow(1.0 - r2, 3) * (1.0 + p.x);
    }
    CHECK(tilde_V_general(zp, {{0, 0}}, {1}) > v.general);
  }
}
