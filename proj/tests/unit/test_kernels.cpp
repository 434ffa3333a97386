#include <doctest.h>

#include <cmath>
#include <random>

#include "glpin/grid.hpp"
#include "glpin/kernels.hpp"
#include "glpin/pinning.hpp"

using namespace glpin;
namespace kn = glpin::kernels;

namespace {

struct RandomLattice {
  GridPtr g;
  LatticeCoefficients c;
  std::vector<kn::cplx> v;
  std::vector<double> tx, ty;

  explicit RandomLattice(unsigned seed, int n = 48) {
    g = build_grid(DomainSpec::ellipse(1.0, 0.7), n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ScalarField U(g, 1.0);
    for (double& x : U.values) x = 0.6 + 0.3 * std::abs(uni(rng));
    c = coefficients_F(U, 0.05);
    const int N = g->size();
    v.resize(N);
    tx.assign(N, 0.0);
    ty.assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
      if (g->node_active[k]) v[k] = {uni(rng), uni(rng)};
      if (g->ex_link[k]) tx[k] = 0.5 * uni(rng);
      if (g->ey_link[k]) ty[k] = 0.5 * uni(rng);
    }
  }
};

}  // namespace

TEST_CASE("blocked reductions match the serial reference") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> a(100003), b(100003);
  for (auto& x : a) x = uni(rng);
  for (auto& x : b) x = uni(rng);
  CHECK(kn::dot(a, b) == doctest::Approx(kn::dot_serial(a, b)).epsilon(1e-12));
  std::vector<double> y1 = b, y2 = b;
  kn::axpy(0.3, a, y1);
  kn::axpy_serial(0.3, a, y2);
  CHECK(y1 == y2);
}

TEST_CASE("results do not depend on the thread count") {
  RandomLattice L(3);
  const auto p = L.c.problem(2.5, true);
  std::vector<kn::cplx> g1(L.g->size()), g4(L.g->size());
  std::vector<double> a1(L.g->size()), b1(L.g->size()), a4(L.g->size()), b4(L.g->size());
  const int saved = kn::thread_count();
  kn::set_thread_count(1);
  const double d1 = kn::dot(L.tx, L.ty);
  const auto e1 = kn::lattice_energy(p, L.v, L.tx, L.ty, {g1, a1, b1});
  kn::set_thread_count(4);
  const double d4 = kn::dot(L.tx, L.ty);
  const auto e4 = kn::lattice_energy(p, L.v, L.tx, L.ty, {g4, a4, b4});
  kn::set_thread_count(saved);
  CHECK(d1 == d4);
  CHECK(e1.total() == e4.total());
  CHECK(g1 == g4);
  CHECK(a1 == a4);
}

TEST_CASE("stencil apply matches the serial reference") {
  const int n = 500;
  std::vector<double> diag(n), x(n), y1(n), y2(n);
  std::vector<int> nbr(4 * n, -1);
  for (int u = 0; u < n; ++u) {
    diag[u] = 4.0 + 0.01 * u;
    x[u] = std::sin(0.1 * u);
    if (u + 1 < n) nbr[4 * u] = u + 1;
    if (u > 0) nbr[4 * u + 1] = u - 1;
    if (u + 20 < n) nbr[4 * u + 2] = u + 20;
    if (u >= 20) nbr[4 * u + 3] = u - 20;
  }
  kn::apply({diag, nbr}, x, y1);
  kn::apply_serial({diag, nbr}, x, y2);
  CHECK(y1 == y2);
}

TEST_CASE("lattice energy and gradient match the scatter reference") {
  RandomLattice L(11);
  const int N = L.g->size();
  const auto p = L.c.problem(3.0, true);
  std::vector<kn::cplx> gv1(N), gv2(N);
  std::vector<double> gx1(N), gy1(N), gx2(N), gy2(N);
  const auto e1 = kn::lattice_energy(p, L.v, L.tx, L.ty, {gv1, gx1, gy1});
  const auto e2 = kn::lattice_energy_serial(p, L.v, L.tx, L.ty, {gv2, gx2, gy2});
  CHECK(e1.kinetic == doctest::Approx(e2.kinetic).epsilon(1e-12));
  CHECK(e1.potential == doctest::Approx(e2.potential).epsilon(1e-12));
  CHECK(e1.field == doctest::Approx(e2.field).epsilon(1e-12));
  double err = 0.0;
  for (int k = 0; k < N; ++k) {
    err = std::max(err, std::abs(gv1[k] - gv2[k]));
    err = std::max(err, std::abs(gx1[k] - gx2[k]));
    err = std::max(err, std::abs(gy1[k] - gy2[k]));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("lattice gradient agrees with central differences") {
  RandomLattice L(5, 24);
  const int N = L.g->size();
  const auto p = L.c.problem(1.7, true);
  std::vector<kn::cplx> gv(N);
  std::vector<double> gx(N), gy(N);
  kn::lattice_energy(p, L.v, L.tx, L.ty, {gv, gx, gy});
  auto E = [&] { return kn::lattice_energy(p, L.v, L.tx, L.ty).total(); };
  const double s = 1e-6;
  std::mt19937 rng(1);
  int checked = 0;
  for (int k = 0; k < N && checked < 40; k += 7) {
    if (!L.g->node_active[k] || !L.g->ex_link[k]) continue;
    ++checked;
    const kn::cplx v0 = L.v[k];
    L.v[k] = v0 + s;
    double ep = E();
    L.v[k] = v0 - s;
    double em = E();
    L.v[k] = v0;
    CHECK((ep - em) / (2 * s) == doctest::Approx(gv[k].real()).epsilon(1e-5));
    L.v[k] = v0 + kn::cplx(0, s);
    ep = E();
    L.v[k] = v0 - kn::cplx(0, s);
    em = E();
    L.v[k] = v0;
    CHECK((ep - em) / (2 * s) == doctest::Approx(gv[k].imag()).epsilon(1e-5));
    const double t0 = L.tx[k];
    L.tx[k] = t0 + s;
    ep = E();
    L.tx[k] = t0 - s;
    em = E();
    L.tx[k] = t0;
    CHECK((ep - em) / (2 * s) == doctest::Approx(gx[k]).epsilon(1e-5));
  }
  CHECK(checked > 10);
}
