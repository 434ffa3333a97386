#pragma once

#include <functional>
#include <span>
#include <vector>

#include "glpin/field.hpp"

namespace glpin {

enum class OperatorKind { poisson, screened };  // -Lap u = f  |  -Lap u + u = f

using BoundaryFn = std::function<double(Point2)>;

struct SolveOptions {
  double tolerance = 1e-10;  // relative residual
  int max_iterations = 0;    // 0: 50 * resolution
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

// Dirichlet problem on the interior nodes with a symmetric Shortley-Weller
// treatment of cut stencil arms; boundary data is evaluated at the crossing
// points. The returned field holds the solution at interior nodes and a
// linear extension on a two-node band outside; other nodes are NaN.
ScalarField solve_dirichlet(OperatorKind kind, const ScalarField& rhs, const BoundaryFn& g,
                            const SolveOptions& opt = {}, SolveReport* report = nullptr);
// Boundary data given as a field sampled around the boundary (bilinear).
ScalarField solve_dirichlet(OperatorKind kind, const ScalarField& rhs, const ScalarField& boundary,
                            const SolveOptions& opt = {}, SolveReport* report = nullptr);

// Recompute band values from interior values and boundary data.
void extend_to_band(ScalarField& u, const BoundaryFn& g);

// Discrete Laplacian consistent with the solver (Shortley-Weller arms using
// the boundary data g). Non-interior nodes NaN.
ScalarField sw_laplacian(const ScalarField& u, const BoundaryFn& g);

// Bilinear Dirac mass at p scaled by 1/h^2, added into f.
void add_dirac(ScalarField& f, Point2 p, double mass);

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients for an SPD operator. With
// `singular` the constant vector is projected out (Neumann problems).
CgResult pcg(const std::function<void(std::span<const double>, std::span<double>)>& apply,
             std::span<const double> inv_diag, std::span<const double> b, std::span<double> x,
             double tol, int max_iter, bool singular = false);

}  // namespace glpin
