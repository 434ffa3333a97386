#pragma once

// Independent reference values used by the tests.

#include <cmath>

namespace oracle {

// Modified Bessel function I0 by its power series.
inline double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

// I0(x) - 1 without cancellation for small x.
inline double bessel_i0m1(double x) {
  const double q = 0.25 * x * x;
  double term = q, sum = q;
  for (int k = 2; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

inline double bessel_i1(double x) {
  double term = 0.5 * x, sum = term;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
  }
  return sum;
}

// London solution on the unit disk: xi0(r) = I0(r)/I0(1) - 1.
inline double disk_xi0(double r) { return bessel_i0(r) / bessel_i0(1.0) - 1.0; }

}  // namespace oracle
