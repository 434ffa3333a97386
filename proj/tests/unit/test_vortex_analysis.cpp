#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "glpin/errors.hpp"
#include "glpin/gl_sim.hpp"
#include "glpin/rng.hpp"
#include "glpin/vortex_analysis.hpp"

using namespace glpin;
using std::numbers::pi;

namespace {

GridPtr disk_grid(int n) { return build_grid(DomainSpec::disk(1.0), n); }

// product of normalised (z - c) / |z - c| ^ d factors, each with a core dip
ComplexField vortices(GridPtr g, const std::vector<Point2>& c, const std::vector<int>& d, double core = 0.03) {
  return ComplexField::sample(g, [&](Point2 p) {
    cplx v = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const cplx z(p.x - c[i].x, p.y - c[i].y);
      const double r = std::abs(z);
      const cplx u = r > 0 ? z / r : cplx(1.0);
      const cplx f = d[i] >= 0 ? std::pow(u, d[i]) : std::pow(std::conj(u), -d[i]);
      v *= f * std::tanh(r / core);
    }
    return v;
  });
}

}  // namespace

TEST_CASE("degree of simple windings") {
  const GridPtr g = disk_grid(128);
  const auto loop = square_loop(*g, {0.0, 0.0}, 0.2);
  REQUIRE(!loop.empty());
  CHECK(degree(vortices(g, {{0.0, 0.0}}, {1}), loop) == 1);
  CHECK(degree(vortices(g, {{0.0, 0.0}}, {2}), loop) == 2);
  CHECK(degree(vortices(g, {{0.0, 0.0}}, {-1}), loop) == -1);
  CHECK(degree(ComplexField(g, 1.0), loop) == 0);
  // a vortex outside the loop does not count
  CHECK(degree(vortices(g, {{0.5, 0.0}}, {1}), loop) == 0);
  // additivity over the enclosed vortices
  CHECK(degree(vortices(g, {{0.05, 0.0}, {-0.05, 0.02}}, {1, 1}), loop) == 2);
  CHECK(degree(vortices(g, {{0.05, 0.0}, {-0.05, 0.02}}, {1, -1}), loop) == 0);
}

TEST_CASE("degree rejects near zeros on the loop") {
  const GridPtr g = disk_grid(128);
  const auto loop = square_loop(*g, {0.0, 0.0}, 0.2);
  ComplexField v = vortices(g, {{0.0, 0.0}}, {1});
  v.values[loop[3]] = 0.01;
  CHECK_THROWS_AS(degree(v, loop), ValidationError);
  CHECK_THROWS_AS(degree(v, {loop[0], loop[1]}), ValidationError);
}

TEST_CASE("degree is invariant under phase and gauge changes") {
  const GridPtr g = disk_grid(128);
  const auto loop = square_loop(*g, {0.1, -0.1}, 0.15);
  std::mt19937_64 rng = stream_rng(11, 0);
  const ComplexField base = vortices(g, {{0.1, -0.1}}, {1});
  for (int t = 0; t < 10; ++t) {
    const double c = 2 * pi * uniform01(rng), a = 0.5 * uniform01(rng), kx = 1 + 2 * uniform01(rng);
    ComplexField v = base;
    for (int k = 0; k < g->size(); ++k) {
      const Point2 p = g->pos(k);
      v.values[k] *= std::polar(1.0, c + a * std::sin(kx * p.x + p.y));
    }
    CHECK(degree(v, loop) == 1);
  }
}

TEST_CASE("defect detection") {
  const GridPtr g = disk_grid(256);
  SUBCASE("two Gaussian dips") {
    const Point2 a{0.3, 0.1}, b{-0.2, -0.35};
    ComplexField v = vortices(g, {a, b}, {1, 1}, 0.02);
    const auto ds = detect_defects(v, 0.5);
    REQUIRE(ds.size() == 2);
    for (const Defect& d : ds) {
      const double e = std::min(distance(d.center, a), distance(d.center, b));
      CHECK(e <= g->h);
      CHECK(d.degree == 1);
      CHECK(d.degree_defined);
      CHECK(!d.touches_boundary);
    }
  }
  SUBCASE("no defects") {
    CHECK(detect_defects(ComplexField(g, 1.0), 0.5).empty());
    CHECK(detect_defects(vortices(g, {{0.5 * g->h, 0.5 * g->h}}, {1}), 1e-3).empty());
  }
  SUBCASE("boundary dip") {
    const auto ds = detect_defects(vortices(g, {{0.99, 0.0}}, {1}, 0.03), 0.5);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].touches_boundary);
    CHECK(ds[0].degree == 0);
  }
}

TEST_CASE("separated disks") {
  const double eta = 0.01;
  SUBCASE("far apart") {
    const auto s = separate_disks({{0.0, 0.0}, {100 * eta, 0.0}}, eta, 9.0);
    CHECK(s.J.size() == 2);
    CHECK(s.kappa == doctest::Approx(1.0));
    CHECK(s.covering);
    CHECK(s.separated);
  }
  SUBCASE("merged") {
    const auto s = separate_disks({{0.0, 0.0}, {3 * eta, 0.0}}, eta, 9.0);
    CHECK(s.J.size() == 1);
    CHECK(s.kappa == doctest::Approx(9.0));
    CHECK(s.covering);
  }
  SUBCASE("random centres") {
    std::mt19937_64 rng = stream_rng(5, 0);
    for (int t = 0; t < 50; ++t) {
      std::vector<Point2> c;
      for (int i = 0; i < 10; ++i) c.push_back({uniform01(rng), uniform01(rng)});
      const auto s = separate_disks(c, eta, 4.0);
      CHECK(s.covering);
      CHECK(s.separated);
      CHECK(s.J.size() >= 1);
      CHECK(s.kappa <= std::pow(4.0, 9) * (1 + 1e-12));
    }
  }
  CHECK_THROWS_AS(separate_disks({{0.0, 0.0}}, eta, 1.5), ValidationError);
}

TEST_CASE("cluster report and comparison") {
  const GridPtr g = disk_grid(128);
  const LondonData L = solve_london(g);
  PinningSpec ps;
  const PinningField pin = build_pinning_term(ps, g);
  REQUIRE(L.lambda_set.size() == 1);
  const Point2 p = L.lambda_set[0];
  Defect d;
  d.center = p;
  d.degree = 1;
  const DefectReport r = cluster_report({d}, L, 100.0, &pin);
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.D() == ClusterDegrees{1});
  CHECK(r.total_degree() == 1);
  REQUIRE(r.clusters[0].meso.size() == 1);
  CHECK(norm(r.clusters[0].meso[0]) <= 1e-12);
  REQUIRE(r.defects[0].micro_coord.has_value());
  CHECK(ps.omega.contains(*r.defects[0].micro_coord));

  Prediction pr;
  pr.d = pr.d_lo = pr.d_hi = 1;
  pr.degrees = {ClusterDegrees{1}};
  const Comparison c = compare(r, pr);
  CHECK(c.count_ok);
  CHECK(c.D_allowed);
  CHECK(c.all_degree_one);
  CHECK(c.all_pinned);
  CHECK(c.max_lambda_distance <= 1e-12);

  // a defect far from every inclusion is not pinned
  Defect off = d;
  off.center = p + Point2{0.5 * ps.delta, 0.5 * ps.delta};
  const Comparison c2 = compare(cluster_report({off}, L, 100.0, &pin), pr);
  CHECK(!c2.all_pinned);
  pr.d = pr.d_lo = pr.d_hi = 2;
  CHECK(!compare(r, pr).count_ok);
}
