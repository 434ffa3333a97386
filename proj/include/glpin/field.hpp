#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "glpin/grid.hpp"

namespace glpin {

using cplx = std::complex<double>;

struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double fill = 0.0);
  static ScalarField sample(GridPtr g, const std::function<double(Point2)>& f);

  double& operator[](int k) { return values[k]; }
  double operator[](int k) const { return values[k]; }
  double at(int i, int j) const { return values[grid->idx(i, j)]; }
};

struct ComplexField {
  GridPtr grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(GridPtr g, cplx fill = 0.0);
  static ComplexField sample(GridPtr g, const std::function<cplx(Point2)>& f);

  cplx& operator[](int k) { return values[k]; }
  cplx operator[](int k) const { return values[k]; }
};

// Node-collocated vector field.
struct VectorField {
  GridPtr grid;
  std::vector<double> x;
  std::vector<double> y;

  VectorField() = default;
  explicit VectorField(GridPtr g);
};

// Staggered vector potential: ax on x-edges, ay on y-edges (values at edge
// midpoints). Only link edges carry meaningful values.
struct EdgeField {
  GridPtr grid;
  std::vector<double> ax;
  std::vector<double> ay;

  EdgeField() = default;
  explicit EdgeField(GridPtr g);
  // Sample a smooth vector function at edge midpoints.
  static EdgeField sample(GridPtr g, const std::function<Point2(Point2)>& f);
  // Perpendicular gradient (-d_y psi, d_x psi) of a nodal field at edge midpoints.
  static EdgeField perp_gradient(const ScalarField& psi);
};

// Bilinear interpolation of node values. Points within 1e-12 of a node return
// the node value.
double interpolate(const ScalarField& f, Point2 p);
cplx interpolate(const ComplexField& f, Point2 p);

// Value at a point where the field may be singular: average of the 4 nearest
// neighbours when p sits on a node, bilinear otherwise.
double regular_value(const ScalarField& f, Point2 p);

// Maximum over interior nodes.
double max_abs_interior(const ScalarField& f);

}  // namespace glpin
