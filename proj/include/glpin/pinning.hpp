#pragma once

#include <optional>
#include <vector>

#include "glpin/field.hpp"
#include "glpin/kernels.hpp"

namespace glpin {

struct PinningSpec {
  double b = 0.5;
  double lambda = 0.4;
  double delta = 0.25;
  double epsilon = 0.01;
  DomainSpec omega = DomainSpec::disk(0.25);

  void validate() const;
};

struct PinningField {
  PinningSpec spec;
  ScalarField a;
  std::vector<Point2> inclusion_centers;

  // Centre y of the inclusion containing p, if any.
  std::optional<Point2> inclusion_of(Point2 p) const;
};

PinningField build_pinning_term(const PinningSpec& spec, GridPtr grid);

// Lattice coefficients for the energies in kernels::lattice_energy.
struct LatticeCoefficients {
  GridPtr grid;
  std::vector<double> cx, cy, pot, target;

  kernels::LatticeProblem problem(double hex = 0.0, bool with_field = false) const;
};

// E_eps(u): edge weights w_e, potential w_i h^2/(4 eps^2) against a^2.
LatticeCoefficients coefficients_E(const ScalarField& a, double epsilon);
// F_eps(v): edge weights w_e U_i U_j, potential w_i h^2 U_i^4/(4 eps^2) against 1.
LatticeCoefficients coefficients_F(const ScalarField& U, double epsilon);

struct LMReport {
  double residual = 0.0;  // max eps^2 |dE/dU_i| / h^2
  int flow_steps = 0;
  int newton_steps = 0;
};

ScalarField solve_lassoued_mironescu(const PinningField& a, double epsilon, LMReport* report = nullptr,
                                     double tolerance = 1e-8);

double energy_E(const ComplexField& u, const ScalarField& a, double epsilon);
double energy_F(const ComplexField& v, const ScalarField& U, double epsilon);
double decoupling_residual(const ScalarField& U, const ComplexField& v, const ScalarField& a, double epsilon);

}  // namespace glpin
