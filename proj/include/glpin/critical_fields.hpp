#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "glpin/london.hpp"
#include "glpin/pinning.hpp"
#include "glpin/renorm.hpp"

namespace glpin {

// Degrees per point of the London minimum set.
using ClusterDegrees = std::vector<int>;

// All D in {floor(d/N0), ceil(d/N0)}^N0 with sum d, in lexicographic order.
std::vector<ClusterDegrees> lambda_d_set(int d, int N0);

// C_{p_k, D} for the points of Lambda.
class MesoTable {
 public:
  void set(int k, int D, double value) { table_[{k, D}] = value; }
  bool has(int k, int D) const { return D == 0 || table_.count({k, D}) > 0; }
  double at(int k, int D) const;  // throws ValidationError when missing
  const std::map<std::pair<int, int>, double>& entries() const { return table_; }

 private:
  std::map<std::pair<int, int>, double> table_;
};

// C_{p,D} for D = 1..D_max at every point of Lambda, from the Hessians.
MesoTable build_meso_table(const LondonData& london, int D_max, int multistart = 0, std::uint64_t seed = 1);

// On the grid of london.xi0:
// W^macro(p, D) + sum C_{p_k, D_k} + tilde V[zeta_(p, D)], points with D_k = 0
// dropped.
struct ScriptW {
  double total = 0.0;
  double macro = 0.0;
  double meso = 0.0;
  double tilde_v = 0.0;
};
ScriptW script_W(const ClusterDegrees& D, const LondonData& london, const MesoTable& meso);

struct WbarEntry {
  double value = 0.0;
  std::vector<ClusterDegrees> argmin;  // all minimisers within 1e-9
  std::vector<std::pair<ClusterDegrees, double>> candidates;
};
using WbarTable = std::map<int, WbarEntry>;

WbarEntry wbar(int d, const LondonData& london, const MesoTable& meso);
WbarTable wbar_table(int d_max, const LondonData& london, const MesoTable& meso);
std::map<int, double> wbar_values(const WbarTable& t);

double L1_of(const ClusterDegrees& D);
double L2_of(double wbar_d, const ClusterDegrees& D);
double L1(int d, int N0);
double L2(int d, double wbar_d, int N0);

double delta1(int d, double M, int N0);
double delta1(int dp, int d, double M, int N0);
// wbar_values[d] for the needed d; wbar_values[0] is taken as 0.
double delta2(int d, const std::map<int, double>& wbar_values, double M, int N0);
double delta2(int dp, int d, const std::map<int, double>& wbar_values, double M, int N0);

double gamma_tilde(double min_w_micro, double gamma, double b, double xi0_inf);
double h0c1(double eps, double lambda, double delta, double b, double xi0_inf, double min_w_micro, double gamma);
double hc1(double h0c1_value, const std::map<int, double>& wbar_values, double M, int N0);

struct CriticalLadder {
  int N0 = 0;
  double M = 0.0;
  double H0c1 = 0.0;
  std::map<int, double> wbar;
  std::vector<int> d_star;
  std::vector<double> K_star;
  std::vector<double> KI;
  std::vector<double> KII;  // KII[k-1] = K^(II)_k
  std::map<int, std::vector<ClusterDegrees>> degrees;  // minimisers of script W per d

  double Hc1() const { return KI.front(); }
};

// Needs wbar for d = 1..N0 + kII_count.
CriticalLadder build_ladder(const std::map<int, double>& wbar_values, int N0, double M, double H0c1_value,
                            int kII_count);

double predicted_energy(int d, double hex, double J0, double M, double H0c1_value, double l1, double l2);
// Same, with L1/L2 from the ladder's wbar table.
double predicted_energy(int d, double hex, double J0, const CriticalLadder& ladder);

struct Prediction {
  int d = 0;
  int d_lo = 0;  // ambiguity interval; equal to d away from critical values
  int d_hi = 0;
  std::string regime;
  std::vector<ClusterDegrees> degrees;
};

// window: half-width of the ambiguity interval around each critical value.
// Around K^(II)_k it is widened by |Delta1 ln(hex / H0c1)|, the gap between
// freezing the logarithm at H0c1 and evaluating it at hex.
Prediction predict(double hex, const CriticalLadder& ladder, double window = 0.0);

// The whole chain from a London solution and a pinning spec to the ladder.
struct FieldsOptions {
  int kII_count = 3;
  MicroOptions micro;
  int micro_search = 9;
  int meso_multistart = 0;
  std::uint64_t seed = 1;
  double bbh_step = 0.005;
};

struct FieldsResult {
  double gamma = 0.0;
  MicroMinimum micro;
  double xi0_inf = 0.0;
  double M = 0.0;
  double J0 = 0.0;
  int N0 = 0;
  double H0c1 = 0.0;
  MesoTable meso;
  WbarTable wbar;
  CriticalLadder ladder;

  double Hc1() const { return ladder.Hc1(); }
  // hex where predicted_energy(d) = predicted_energy(d - 1), by bisection.
  double crossing(int d) const;
};

FieldsResult compute_fields(const LondonData& london, const PinningSpec& pinning, const FieldsOptions& opt = {});

}  // namespace glpin
