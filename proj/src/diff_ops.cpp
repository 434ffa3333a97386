#include "glpin/diff_ops.hpp"

#include <limits>

namespace glpin {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

VectorField gradient(const ScalarField& f) {
  const Grid& g = *f.grid;
  VectorField out(f.grid);
  std::fill(out.x.begin(), out.x.end(), kNaN);
  std::fill(out.y.begin(), out.y.end(), kNaN);
  const double s = 0.5 / g.h;
  for (int k : g.interior_nodes) {
    out.x[k] = (f.values[k + 1] - f.values[k - 1]) * s;
    out.y[k] = (f.values[k + g.nx] - f.values[k - g.nx]) * s;
  }
  return out;
}

ScalarField divergence(const VectorField& a) {
  const Grid& g = *a.grid;
  ScalarField out(a.grid, kNaN);
  const double s = 0.5 / g.h;
  for (int k : g.interior_nodes)
    out.values[k] = (a.x[k + 1] - a.x[k - 1] + a.y[k + g.nx] - a.y[k - g.nx]) * s;
  return out;
}

ScalarField curl(const VectorField& a) {
  const Grid& g = *a.grid;
  ScalarField out(a.grid, kNaN);
  const double s = 0.5 / g.h;
  for (int k : g.interior_nodes)
    out.values[k] = (a.y[k + 1] - a.y[k - 1] - a.x[k + g.nx] + a.x[k - g.nx]) * s;
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = *f.grid;
  ScalarField out(f.grid, kNaN);
  const double s = 1.0 / (g.h * g.h);
  for (int k : g.interior_nodes)
    out.values[k] =
        (f.values[k + 1] + f.values[k - 1] + f.values[k + g.nx] + f.values[k - g.nx] - 4.0 * f.values[k]) * s;
  return out;
}

}  // namespace glpin
