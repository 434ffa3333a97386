#include "glpin/critical_fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glpin/bbh.hpp"
#include "glpin/errors.hpp"

namespace glpin {

namespace {

constexpr double kPi = std::numbers::pi;

double wbar_at(const std::map<int, double>& w, int d) {
  if (d == 0) return 0.0;
  const auto it = w.find(d);
  if (it == w.end()) throw ValidationError("wbar table has no entry for d = " + std::to_string(d));
  return it->second;
}

ClusterDegrees canonical(int d, int N0) { return lambda_d_set(d, N0).front(); }

}  // namespace

std::vector<ClusterDegrees> lambda_d_set(int d, int N0) {
  if (d < 0 || N0 < 1) throw ValidationError("lambda_d_set needs d >= 0 and N0 >= 1");
  const int q = d / N0, r = d % N0;
  ClusterDegrees D(N0, q);
  for (int k = N0 - r; k < N0; ++k) D[k] = q + 1;  // ascending: first permutation
  std::vector<ClusterDegrees> out;
  do out.push_back(D);
  while (std::next_permutation(D.begin(), D.end()));
  return out;
}

double MesoTable::at(int k, int D) const {
  if (D == 0) return 0.0;
  const auto it = table_.find({k, D});
  if (it == table_.end())
    throw ValidationError("meso table has no entry for point " + std::to_string(k) + ", D = " + std::to_string(D));
  return it->second;
}

MesoTable build_meso_table(const LondonData& london, int D_max, int multistart, std::uint64_t seed) {
  MesoTable t;
  for (std::size_t k = 0; k < london.lambda_set.size(); ++k)
    for (int D = 1; D <= D_max; ++D)
      t.set(static_cast<int>(k), D, minimize_w_meso(D, london.hessians[k], multistart, seed).value);
  return t;
}

ScriptW script_W(const ClusterDegrees& D, const LondonData& london, const MesoTable& meso) {
  if (D.size() != london.lambda_set.size()) throw ValidationError("cluster degrees do not match the London minimum set");
  ScriptW w;
  VortexConfig c;
  for (std::size_t k = 0; k < D.size(); ++k) {
    if (D[k] < 0) throw ValidationError("cluster degrees must be nonnegative");
    if (D[k] == 0) continue;
    c.points.push_back(london.lambda_set[k]);
    c.degrees.push_back(D[k]);
    w.meso += meso.at(static_cast<int>(k), D[k]);
  }
  if (c.points.empty()) return w;
  const GridPtr& grid = london.xi0.grid;
  w.macro = w_macro(c, grid);
  w.tilde_v = tilde_V_at_min(solve_zeta(c.points, c.degrees, grid), c.points, c.degrees);
  w.total = w.macro + w.meso + w.tilde_v;
  return w;
}

WbarEntry wbar(int d, const LondonData& london, const MesoTable& meso) {
  const int N0 = static_cast<int>(london.lambda_set.size());
  WbarEntry e;
  for (const ClusterDegrees& D : lambda_d_set(d, N0)) e.candidates.emplace_back(D, script_W(D, london, meso).total);
  e.value = e.candidates.front().second;
  for (const auto& [D, v] : e.candidates) e.value = std::min(e.value, v);
  const double tol = 1e-9 * (1.0 + std::abs(e.value));
  for (const auto& [D, v] : e.candidates)
    if (v <= e.value + tol) e.argmin.push_back(D);
  return e;
}

WbarTable wbar_table(int d_max, const LondonData& london, const MesoTable& meso) {
  WbarTable t;
  for (int d = 1; d <= d_max; ++d) t[d] = wbar(d, london, meso);
  return t;
}

std::map<int, double> wbar_values(const WbarTable& t) {
  std::map<int, double> out;
  for (const auto& [d, e] : t) out[d] = e.value;
  return out;
}

double L1_of(const ClusterDegrees& D) {
  double s = 0.0;
  int d = 0;
  for (int x : D) {
    s += static_cast<double>(x) * x;
    d += x;
  }
  return 0.5 * kPi * (s - d);
}

double L2_of(double wbar_d, const ClusterDegrees& D) {
  double s = 0.0;
  for (int x : D)
    if (x >= 1) s += (x - static_cast<double>(x) * x) * std::log(static_cast<double>(x));
  return wbar_d + 0.5 * kPi * s;
}

double L1(int d, int N0) { return d == 0 ? 0.0 : L1_of(canonical(d, N0)); }
double L2(int d, double wbar_d, int N0) { return d == 0 ? 0.0 : L2_of(wbar_d, canonical(d, N0)); }

double delta1(int d, double M, int N0) { return (L1(d + 1, N0) - L1(d, N0)) / M; }

double delta1(int dp, int d, double M, int N0) {
  if (!(dp > d)) throw ValidationError("delta1 needs d' > d");
  return (L1(dp, N0) - L1(d, N0)) / (M * (dp - d));
}

double delta2(int d, const std::map<int, double>& w, double M, int N0) {
  return (L2(d + 1, wbar_at(w, d + 1), N0) - L2(d, wbar_at(w, d), N0)) / M;
}

double delta2(int dp, int d, const std::map<int, double>& w, double M, int N0) {
  if (!(dp > d)) throw ValidationError("delta2 needs d' > d");
  return (L2(dp, wbar_at(w, dp), N0) - L2(d, wbar_at(w, d), N0)) / (M * (dp - d));
}

double gamma_tilde(double min_w_micro, double gamma, double b, double xi0_inf) {
  return (min_w_micro + b * b * (gamma + kPi * std::log(b))) / (2.0 * kPi * xi0_inf);
}

double h0c1(double eps, double lambda, double delta, double b, double xi0_inf, double min_w_micro, double gamma) {
  if (!(eps > 0 && lambda > 0 && delta > 0 && b > 0 && b <= 1 && xi0_inf > 0))
    throw ValidationError("h0c1: parameters out of range");
  const double lead = (b * b * std::abs(std::log(eps)) + (1 - b * b) * std::abs(std::log(lambda * delta))) / (2 * xi0_inf);
  return lead + gamma_tilde(min_w_micro, gamma, b, xi0_inf);
}

double hc1(double h0c1_value, const std::map<int, double>& w, double M, int N0) {
  // same operation order as the ladder so that K^(I)_1 == H_c1 bitwise
  double best = wbar_at(w, 1);
  for (int d = 2; d <= N0; ++d) best = std::min(best, wbar_at(w, d) / d);
  return h0c1_value + best / M;
}

CriticalLadder build_ladder(const std::map<int, double>& w, int N0, double M, double H0c1_value, int kII_count) {
  if (N0 < 1 || !(M > 0.0)) throw ValidationError("ladder needs N0 >= 1 and M > 0");
  CriticalLadder L;
  L.N0 = N0;
  L.M = M;
  L.H0c1 = H0c1_value;
  L.wbar = w;
  int prev = 0;
  while (prev < N0) {
    const double wp = wbar_at(w, prev);
    double kmin = 0.0;
    for (int d = prev + 1; d <= N0; ++d) {
      const double k = (wbar_at(w, d) - wp) / (d - prev);
      if (d == prev + 1 || k < kmin) kmin = k;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(kmin));
    int dstar = prev + 1;
    for (int d = prev + 1; d <= N0; ++d)
      if ((wbar_at(w, d) - wp) / (d - prev) <= kmin + tol) dstar = d;
    L.d_star.push_back(dstar);
    L.K_star.push_back((wbar_at(w, dstar) - wp) / (dstar - prev));
    L.KI.push_back(H0c1_value + L.K_star.back() / M);
    prev = dstar;
  }
  // K^(II)_k brackets the step N0+k-1 -> N0+k, so that K^(II)_1 uses Delta_{N0}.
  const double lnH = std::log(H0c1_value);
  for (int k = 1; k <= kII_count; ++k) {
    const int d = N0 + k - 1;
    L.KII.push_back(H0c1_value + delta1(d, M, N0) * lnH + delta2(d, w, M, N0));
  }
  return L;
}

double predicted_energy(int d, double hex, double J0, double M, double H0c1_value, double l1, double l2) {
  if (!(hex > 0.0)) throw ValidationError("predicted energy needs hex > 0");
  return hex * hex * J0 + d * M * (-hex + H0c1_value) + l1 * std::log(hex) + l2;
}

double predicted_energy(int d, double hex, double J0, const CriticalLadder& L) {
  const double l2 = d == 0 ? 0.0 : L2(d, wbar_at(L.wbar, d), L.N0);
  return predicted_energy(d, hex, J0, L.M, L.H0c1, L1(d, L.N0), l2);
}

Prediction predict(double hex, const CriticalLadder& L, double window) {
  struct Threshold {
    double K;
    int below, above;
    double extra;
  };
  std::vector<Threshold> th;
  for (std::size_t k = 0; k < L.KI.size(); ++k)
    th.push_back({L.KI[k], k == 0 ? 0 : L.d_star[k - 1], L.d_star[k], 0.0});
  for (std::size_t k = 0; k < L.KII.size(); ++k) {
    const int below = L.N0 + static_cast<int>(k);
    th.push_back({L.KII[k], below, below + 1, std::abs(delta1(below, L.M, L.N0) * std::log(hex / L.H0c1))});
  }
  Prediction p;
  for (const Threshold& t : th)
    if (hex > t.K) p.d = t.above;
  p.d_lo = p.d_hi = p.d;
  for (const Threshold& t : th)
    if (std::abs(hex - t.K) <= window + 1.5 * t.extra) {
      p.d_lo = std::min({p.d_lo, t.below});
      p.d_hi = std::max({p.d_hi, t.above});
    }
  if (p.d_lo != p.d_hi)
    p.regime = "ambiguous";
  else if (p.d == 0)
    p.regime = "subcritical";
  else if (p.d < L.N0)
    p.regime = "first-ladder";
  else if (p.d == L.N0)
    p.regime = "saturated";
  else if (!L.KII.empty() && hex > L.KII.back())
    p.regime = "beyond-table";
  else
    p.regime = "second-ladder";
  if (const auto it = L.degrees.find(p.d); it != L.degrees.end()) p.degrees = it->second;
  return p;
}

double FieldsResult::crossing(int d) const {
  auto gap = [&](double h) { return predicted_energy(d, h, J0, ladder) - predicted_energy(d - 1, h, J0, ladder); };
  double lo = 1e-3, hi = std::max(10.0, 4.0 * H0c1);
  while (gap(hi) > 0.0 && hi < 1e8) hi *= 2.0;
  if (gap(lo) < 0.0 || gap(hi) > 0.0) throw SolverError("crossing field not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FieldsResult compute_fields(const LondonData& london, const PinningSpec& pinning, const FieldsOptions& opt) {
  pinning.validate();
  FieldsResult r;
  r.gamma = bbh_gamma(opt.bbh_step).gamma;
  r.micro = minimize_w_micro(pinning, opt.micro, opt.micro_search);
  r.xi0_inf = london.xi0_inf_norm;
  r.M = london.M_omega;
  r.J0 = london.J0;
  r.N0 = static_cast<int>(london.lambda_set.size());
  r.H0c1 = h0c1(pinning.epsilon, pinning.lambda, pinning.delta, pinning.b, r.xi0_inf, r.micro.value, r.gamma);
  const int d_max = r.N0 + opt.kII_count;
  r.meso = build_meso_table(london, (d_max + r.N0 - 1) / r.N0, opt.meso_multistart, opt.seed);
  r.wbar = wbar_table(d_max, london, r.meso);
  r.ladder = build_ladder(wbar_values(r.wbar), r.N0, r.M, r.H0c1, opt.kII_count);
  r.ladder.degrees[0] = {ClusterDegrees(r.N0, 0)};
  for (const auto& [d, e] : r.wbar) r.ladder.degrees[d] = e.argmin;
  return r;
}

}  // namespace glpin
