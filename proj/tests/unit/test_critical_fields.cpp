#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "glpin/bbh.hpp"
#include "glpin/critical_fields.hpp"
#include "glpin/errors.hpp"

using namespace glpin;
using std::numbers::pi;

namespace {

std::map<int, double> table(std::initializer_list<double> v) {
  std::map<int, double> w;
  int d = 1;
  for (double x : v) w[d++] = x;
  return w;
}

// W_d = 0.75 d + 0.25 d^2 gives (1, 2.5, 4.5, 7, ...).
std::map<int, double> quadratic_table(int n) {
  std::map<int, double> w;
  for (int d = 1; d <= n; ++d) w[d] = 0.75 * d + 0.25 * d * d;
  return w;
}

void brute(int N0, int d, int k, ClusterDegrees& cur, std::set<ClusterDegrees>& out) {
  if (k == N0) {
    int s = 0, lo = 1 << 30, hi = -1;
    for (int x : cur) {
      s += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (s == d && hi - lo <= 1) out.insert(cur);
    return;
  }
  for (int x = 0; x <= d; ++x) {
    cur[k] = x;
    brute(N0, d, k + 1, cur, out);
  }
}

}  // namespace

TEST_CASE("balanced degree sets") {
  CHECK(lambda_d_set(5, 3) == std::vector<ClusterDegrees>{{1, 2, 2}, {2, 1, 2}, {2, 2, 1}});
  CHECK(lambda_d_set(3, 3) == std::vector<ClusterDegrees>{{1, 1, 1}});
  CHECK(lambda_d_set(2, 3) == std::vector<ClusterDegrees>{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  for (int N0 = 1; N0 <= 4; ++N0)
    for (int d = 1; d <= 12; ++d) {
      std::set<ClusterDegrees> ref;
      ClusterDegrees cur(N0);
      brute(N0, d, 0, cur, ref);
      const auto got = lambda_d_set(d, N0);
      CHECK(std::set<ClusterDegrees>(got.begin(), got.end()) == ref);
      CHECK(got.size() == ref.size());
    }
  CHECK_THROWS_AS(lambda_d_set(1, 0), ValidationError);
}

TEST_CASE("log coefficients L1 and L2") {
  const int N0 = 3;
  CHECK(L1(4, N0) == doctest::Approx(pi));
  CHECK(L2(4, 7.0, N0) == doctest::Approx(7.0 - pi * std::log(2.0)));
  for (int d = 1; d <= N0; ++d) {
    CHECK(L1(d, N0) == 0.0);
    CHECK(L2(d, 1.25 * d, N0) == 1.25 * d);
  }
  CHECK(L1(0, N0) == 0.0);
  CHECK(L2(0, 5.0, N0) == 0.0);
  for (int d = 1; d <= 14; ++d)
    for (const ClusterDegrees& D : lambda_d_set(d, N0)) {
      CHECK(L1_of(D) == L1(d, N0));
      CHECK(L2_of(2.0, D) == L2(d, 2.0, N0));
    }
}

TEST_CASE("increments Delta1 and Delta2") {
  const int N0 = 3;
  const double M = 1.7;
  const auto w = quadratic_table(12);
  for (int d = 0; d < N0; ++d) CHECK(delta1(d, M, N0) == 0.0);
  CHECK(delta1(N0, M, N0) == doctest::Approx(pi / M));
  for (int d = 0; d <= 10; ++d) {
    CHECK(delta1(d, M, N0) == doctest::Approx(pi / M * (d / N0)));
    for (int dp = d + 1; dp <= 11; ++dp) {
      double s = 0.0;
      for (int k = d; k < dp; ++k) s += k / N0;
      CHECK(delta1(dp, d, M, N0) == doctest::Approx(pi / (M * (dp - d)) * s));
    }
    // closed form of Delta2 - (W_{d+1} - W_d)/M
    const int q = d / N0;
    double corr = 0.0;
    if (d >= N0) corr = -pi / (2 * M) * q * ((1 + q) * std::log(1.0 + q) + (1 - q) * std::log(static_cast<double>(q)));
    const double wd = d == 0 ? 0.0 : w.at(d);
    CHECK(delta2(d, w, M, N0) - (w.at(d + 1) - wd) / M == doctest::Approx(corr).epsilon(1e-12).scale(1.0));
  }
  for (int d = 0; d < N0; ++d)
    for (int dp = d + 1; dp <= N0; ++dp) {
      const double wd = d == 0 ? 0.0 : w.at(d);
      CHECK(delta2(dp, d, w, M, N0) == doctest::Approx((w.at(dp) - wd) / (M * (dp - d))));
    }
  // (d''-d) D(d'',d) = (d'-d) D(d',d) + (d''-d') D(d'',d')
  for (int d = 0; d <= 6; ++d)
    for (int dp = d + 1; dp <= 8; ++dp)
      for (int dpp = dp + 1; dpp <= 10; ++dpp) {
        for (auto f : {+[](int a, int b, const std::map<int, double>& w, double M) { return delta2(a, b, w, M, 3); },
                       +[](int a, int b, const std::map<int, double>&, double M) { return delta1(a, b, M, 3); }}) {
          const double lhs = (dpp - d) * f(dpp, d, w, M);
          const double rhs = (dp - d) * f(dp, d, w, M) + (dpp - dp) * f(dpp, dp, w, M);
          CHECK(std::abs(lhs - rhs) < 1e-12 * (1 + std::abs(lhs)));
        }
      }
}

TEST_CASE("first critical field formulas") {
  const double lead = (0.25 * std::log(1e3) + 0.75 * std::log(1e2)) / (2 * 0.21015);
  CHECK(lead == doctest::Approx(12.33).epsilon(1e-3));
  // gamma tilde = 0: both contributions chosen to cancel
  const double gamma = 1.2, b = 0.5;
  const double wmicro = -b * b * (gamma + pi * std::log(b));
  CHECK(gamma_tilde(wmicro, gamma, b, 0.21015) == doctest::Approx(0.0).scale(1.0));
  CHECK(h0c1(1e-3, 0.1, 0.1, b, 0.21015, wmicro, gamma) == doctest::Approx(lead));
  // b = 1 removes the pinning term
  const double h1 = h0c1(1e-3, 0.1, 0.1, 1.0, 0.2, 0.0, gamma);
  CHECK(h1 == doctest::Approx(std::log(1e3) / 0.4 + gamma / (2 * pi * 0.2)));
  std::vector<double> gaps;
  for (double bb : {0.9, 0.99, 0.999})
    gaps.push_back(h0c1(1e-3, 0.1, 0.1, bb, 0.2, 0.0, gamma) - h0c1(1e-3, 0.1, 0.1, bb, 0.2, 0.0, gamma) +
                   (1 - bb * bb) * std::abs(std::log(0.01)));
  CHECK(gaps[2] < gaps[1]);
  CHECK(gaps[1] < gaps[0]);
  CHECK(hc1(10.0, table({2.0}), 4.0, 1) == doctest::Approx(10.5));
  CHECK(hc1(10.0, table({2.0, 3.0, 3.3}), 2.0, 3) == doctest::Approx(10.0 + 1.1 / 2.0));
}

TEST_CASE("critical ladder construction") {
  {
    const auto L = build_ladder(table({1, 3, 4}), 3, 1.0, 0.0, 0);
    CHECK(L.d_star == std::vector<int>{1, 3});
    CHECK(L.K_star[0] == doctest::Approx(1.0));
    CHECK(L.K_star[1] == doctest::Approx(1.5));
  }
  {
    const auto L = build_ladder(table({1, 2, 3}), 3, 1.0, 0.0, 0);
    CHECK(L.d_star == std::vector<int>{3});
  }
  {
    const auto L = build_ladder(table({1, 2.5, 4.5}), 3, 1.0, 0.0, 0);
    CHECK(L.d_star == std::vector<int>{1, 2, 3});
    CHECK(L.K_star == std::vector<double>{1.0, 1.5, 2.0});
  }
  // strictly increasing energies per level, last step at N0, K^(I)_1 = H_c1
  for (const auto& w : {table({3, 2, 4, 5}), table({-1, -1.5, -1.2, 0.4}), table({0.3, 0.7, 0.9, 1.6}),
                        table({2, 4, 6, 8})}) {
    const auto L = build_ladder(w, 4, 1.3, 7.0, 0);
    for (std::size_t k = 1; k < L.K_star.size(); ++k) CHECK(L.K_star[k] > L.K_star[k - 1]);
    CHECK(L.d_star.back() == 4);
    CHECK(L.Hc1() == hc1(7.0, w, 1.3, 4));
    CHECK(lambda_d_set(L.d_star.back(), 4) == std::vector<ClusterDegrees>{{1, 1, 1, 1}});
  }
}

TEST_CASE("predictor agrees with the energy expansion") {
  const int N0 = 3;
  const double M = 2.0, H0 = 50.0, J0 = 0.1;
  const auto w = quadratic_table(N0 + 7);
  const CriticalLadder L = build_ladder(w, N0, M, H0, 6);
  for (std::size_t k = 1; k < L.KII.size(); ++k) REQUIRE(L.KII[k] > L.KII[k - 1]);
  REQUIRE(L.KII.front() > L.KI.back());

  // crossing with the vortex-free state
  for (int d = 1; d <= N0; ++d) {
    const double h = H0 + w.at(d) / (d * M);
    CHECK(predicted_energy(d, h, J0, L) == doctest::Approx(predicted_energy(0, h, J0, L)));
  }
  CHECK(predict(L.KI.front() - 1.0, L).d == 0);
  CHECK(predict(L.KI.front() - 1.0, L).regime == "subcritical");

  const double lo = L.KI.front() - 2.0, hi = L.KII[4] - 0.01;
  int checked = 0;
  for (int s = 0; s < 50; ++s) {
    const double h = lo + (hi - lo) * (s + 0.5) / 50;
    const Prediction p = predict(h, L, 1e-9);
    int best = 0;
    for (int d = 1; d <= N0 + 5; ++d)
      if (predicted_energy(d, h, J0, L) < predicted_energy(best, h, J0, L)) best = d;
    CHECK(best >= p.d_lo);
    CHECK(best <= p.d_hi);
    if (p.d_lo == p.d_hi) {
      CHECK(best == p.d);
      ++checked;
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("script W on London data") {
  const GridPtr g = build_grid(DomainSpec::disk(1.0), 128);
  const LondonData disk = solve_london(g);
  const MesoTable meso = build_meso_table(disk, 2);
  CHECK(meso.at(0, 1) == 0.0);
  CHECK(meso.at(0, 0) == 0.0);
  CHECK_THROWS_AS(meso.at(0, 3), ValidationError);
  const ScriptW w = script_W({1}, disk, meso);
  VortexConfig c{{disk.lambda_set[0]}, {1}};
  CHECK(w.macro == doctest::Approx(w_macro(c, g)));
  CHECK(w.total == doctest::Approx(w.macro + w.tilde_v));
  CHECK(script_W({0}, disk, meso).total == 0.0);

  SyntheticXi0 s;
  s.wells = {{-0.35, 0.0}, {0.35, 0.0}};
  const LondonData two = london_from_xi0(sample_synthetic(g, s));
  REQUIRE(two.lambda_set.size() == 2);
  const MesoTable m2 = build_meso_table(two, 2);
  const double w11 = script_W({1, 1}, two, m2).total, w20 = script_W({2, 0}, two, m2).total;
  MESSAGE("two wells: W(1,1) = " << w11 << ", W(2,0) = " << w20);
  CHECK(std::abs(w11 - w20) > 1e-3);
  CHECK(script_W({0, 0}, two, m2).total == 0.0);
  const WbarEntry e2 = wbar(2, two, m2);
  CHECK(e2.candidates.size() == 1);  // Lambda_2 = {(1,1)} for N0 = 2
  CHECK(e2.value == w11);
  CHECK_THROWS_AS(script_W({1}, two, m2), ValidationError);
}

TEST_CASE("radial vortex profile constant") {
  const BbhGamma g = bbh_gamma();
  MESSAGE("gamma = " << g.gamma << " +- " << g.error);
  CHECK(std::abs(g.remainders[2] - g.remainders[1]) <= 1e-3);
  CHECK(g.remainders[1] < g.remainders[0]);
  CHECK(g.remainders[2] < g.remainders[1]);
  const RadialProfile p = bbh_profile(50.0);
  for (std::size_t i = 1; i < p.f.size(); ++i) CHECK(p.f[i] > p.f[i - 1]);
  CHECK(std::abs(p.slope_at_origin - shooting_slope()) < 1e-3);
  CHECK_THROWS_AS(bbh_profile(1.0), ValidationError);
}
