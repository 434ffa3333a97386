#pragma once

#include <vector>

#include "glpin/elliptic.hpp"
#include "glpin/field.hpp"

namespace glpin {

struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double quad(Point2 p) const { return xx * p.x * p.x + 2 * xy * p.x * p.y + yy * p.y * p.y; }
  Point2 apply(Point2 p) const { return {xx * p.x + xy * p.y, xy * p.x + yy * p.y}; }
  // Eigenvalues in increasing order.
  std::pair<double, double> eigenvalues() const;
  // Unit eigenvector of the largest eigenvalue.
  Point2 major_axis() const;
  double det() const { return xx * yy - xy * xy; }
};

// Analytic stand-in for xi0 with prescribed wells:
//   xi(x) = -depth + curvature * prod_i |x - p_i|^2 / L^{2(N-1)},
// L the mean distance between wells (1 for a single well).
struct SyntheticXi0 {
  std::vector<Point2> wells;
  double depth = 0.2;
  double curvature = 0.5;

  double operator()(Point2 x) const;
};

struct LondonData {
  ScalarField xi0;
  ScalarField h0;
  std::vector<Point2> lambda_set;
  std::vector<Sym2> hessians;
  double xi0_inf_norm = 0.0;
  double M_omega = 0.0;
  double J0 = 0.0;
  bool synthetic = false;
};

struct LambdaSet {
  std::vector<Point2> points;
  std::vector<double> values;
  std::vector<Sym2> hessians;
};

LondonData solve_london(GridPtr grid);
// Build LondonData around a given xi0 (synthetic injection); h0 = 1 + xi0.
LondonData london_from_xi0(const ScalarField& xi0);
ScalarField sample_synthetic(GridPtr grid, const SyntheticXi0& s);

// tol < 0 selects 1e-4 * ||xi0||_inf.
LambdaSet find_lambda(const ScalarField& xi0, double tol = -1.0);
double compute_J0(const ScalarField& xi0);
// max |xi0 - (Lap_h xi0 - 1)| over interior nodes.
double london_identity_residual(const LondonData& d);

ScalarField solve_zeta(const std::vector<Point2>& points, const std::vector<int>& degrees, GridPtr grid);

struct TildeV {
  double general = 0.0;
  double at_min = 0.0;
};

double tilde_V_general(const ScalarField& zeta, const std::vector<Point2>& points, const std::vector<int>& degrees);
double tilde_V_at_min(const ScalarField& zeta, const std::vector<Point2>& points, const std::vector<int>& degrees);
TildeV tilde_V(const ScalarField& zeta, const std::vector<Point2>& points, const std::vector<int>& degrees);

}  // namespace glpin
