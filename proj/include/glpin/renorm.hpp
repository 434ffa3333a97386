#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "glpin/field.hpp"
#include "glpin/london.hpp"
#include "glpin/pinning.hpp"

namespace glpin {

struct VortexConfig {
  std::vector<Point2> points;
  std::vector<int> degrees;

  int total_degree() const;
  // Points inside the domain (at least one grid step from the boundary),
  // pairwise distinct, nonzero degrees.
  void validate(const Grid& g) const;
};

// ---- macroscopic ----

// Harmonic R with R = -sum d_i ln|z - z_i| on the boundary.
ScalarField solve_regular_part(const VortexConfig& c, GridPtr grid);
double w_macro(const VortexConfig& c, GridPtr grid);
double w_macro(const VortexConfig& c, const ScalarField& R);
// exp(i(sum d_i theta_i + H)), H the harmonic conjugate of R.
ComplexField canonical_phase(const VortexConfig& c, GridPtr grid);
ComplexField canonical_phase(const VortexConfig& c, const ScalarField& R);
// 1/2 sum over lattice edges outside the r-disks of the squared wrapped phase
// increments of a unit-modulus field.
double dirichlet_energy_outside(const ComplexField& w, const VortexConfig& c, double r);

// ---- mesoscopic ----

double w_meso_energy(const std::vector<Point2>& x, const Sym2& Q, std::vector<Point2>* grad = nullptr);

// Log gas -pi sum_{i != j} ln|x_i - x_j| + sum_i V(x_i); V returns its value
// and writes its gradient.
using Potential = std::function<double(Point2, Point2&)>;
double log_gas_energy(const std::vector<Point2>& x, const Potential& V, std::vector<Point2>* grad = nullptr);

struct MesoResult {
  std::vector<Point2> points;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct DescentOptions {
  double grad_tol = 1e-8;
  int max_iterations = 200000;
};

// Gradient descent with step halving from one starting configuration.
MesoResult descend_log_gas(std::vector<Point2> x, const Potential& V, const DescentOptions& opt = {});

// multistart = 0 selects 8 D. Start points are drawn in the ellipse Q(x) <= 1.
MesoResult minimize_w_meso(int D, const Sym2& Q, int multistart = 0, std::uint64_t seed = 1);
// Same search for a general trap, starting points drawn in {Q(x) <= scale^2};
// the descent and its gradient tolerance work in units of `scale`.
MesoResult minimize_log_gas(int D, const Potential& V, const Sym2& Q, double scale, int multistart,
                            std::uint64_t seed);

// ---- microscopic ----

struct MicroOptions {
  double Rhat = 1000.0;
  double rhat = 1e-3;
  int n_theta = 256;
};

struct MicroResult {
  double value = 0.0;         // Richardson-extrapolated
  double coarse = 0.0;        // at (Rhat, rhat)
  double fine = 0.0;          // at (2 Rhat, rhat / 2)
  int cg_iterations = 0;
};

MicroResult w_micro_detail(Point2 x0, const PinningSpec& spec, const MicroOptions& opt = {});
double w_micro(Point2 x0, const PinningSpec& spec, const MicroOptions& opt = {});

struct MicroMinimum {
  Point2 x0;
  double value = 0.0;
  double search_step = 0.0;
  std::vector<std::pair<Point2, double>> probes;
};

MicroMinimum minimize_w_micro(const PinningSpec& spec, const MicroOptions& opt = {}, int search = 9);

}  // namespace glpin
