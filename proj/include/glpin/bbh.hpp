#pragma once

#include <vector>

namespace glpin {

// Degree-one radial profile u = f(r) e^{i theta} of the unit-scale energy
// 1/2 |grad u|^2 + 1/4 (1 - |u|^2)^2 on B(0,R), f(0) = 0, f(R) = 1.
struct RadialProfile {
  double R = 0.0;
  double step = 0.0;
  std::vector<double> r;
  std::vector<double> f;
  double energy = 0.0;         // pi int (f'^2 + f^2/r^2 + (1-f^2)^2/2) r dr
  double slope_at_origin = 0.0;
  int newton_steps = 0;
};

// Initial slope from shooting to `r_shoot` with bisection; throws
// SolverError if the slope bracket does not straddle the profile.
double shooting_slope(double r_shoot = 10.0);

RadialProfile bbh_profile(double R, double step = 0.005);

struct BbhGamma {
  double gamma = 0.0;          // extrapolated
  double error = 0.0;          // extrapolation correction size
  std::vector<double> radii;
  std::vector<double> remainders;  // energy(R) - pi ln R
};

BbhGamma bbh_gamma(double step = 0.005);

}  // namespace glpin
