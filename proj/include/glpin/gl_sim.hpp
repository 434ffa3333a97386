#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glpin/critical_fields.hpp"
#include "glpin/field.hpp"
#include "glpin/kernels.hpp"
#include "glpin/london.hpp"
#include "glpin/pinning.hpp"
#include "glpin/renorm.hpp"

namespace glpin {

// Decoupled unknowns: u = U v. A lives on edges (theta_e = h A_e).
struct GLState {
  ComplexField v;
  EdgeField A;
  double hex = 0.0;
  ScalarField U;
  double epsilon = 0.01;

  GridPtr grid() const { return v.grid; }
};

using GLEnergy = kernels::LatticeTerms;

// F(v, A) with the U-weighted coefficients.
GLEnergy energy_full(const GLState& s);
// E(u, A) with the pinning term a.
GLEnergy energy_E_full(const ComplexField& u, const EdgeField& A, const ScalarField& a, double epsilon, double hex);
// F(v) without field.
double energy_F_only(const ComplexField& v, const ScalarField& U, double epsilon);

// u e^{i phi}, A + grad phi, with the lattice gradient (phi_j - phi_i)/h so the
// lattice energies are exactly invariant.
void gauge_transform(ComplexField& u, EdgeField& A, const ScalarField& phi);

// Lattice divergence (sum of outgoing A over link edges)/h at active nodes.
ScalarField lattice_divergence(const EdgeField& A);
// Circulation / h^2 on plaquettes with plaq_w > 0, NaN elsewhere.
ScalarField lattice_curl(const EdgeField& A);

struct CoulombResult {
  EdgeField A;
  ScalarField phi;
  int iterations = 0;
  double max_divergence = 0.0;
};

// A' = A + grad phi with lattice div A' = 0 (Neumann graph Laplacian solve).
// Edges leaving the link graph carry no flux, which is the discrete A.nu = 0.
CoulombResult coulomb_project(const EdgeField& A, double tolerance = 1e-13);

// Stream functions live on plaquettes (index of the lower left node) and vanish
// off the active plaquettes. A = grad_perp psi in the lattice sense:
//   theta_x(i,j) = -(psi(i,j) - psi(i,j-1)),  theta_y(i,j) = psi(i,j) - psi(i-1,j).
EdgeField edges_from_stream(const ScalarField& psi);
// Inverse of edges_from_stream for a divergence-free A (column integration).
ScalarField stream_from_edges(const EdgeField& A);
// Nodal field averaged onto active plaquettes.
ScalarField plaquette_samples(const ScalarField& nodal);
// Bilinear interpolation of plaquette-centred values.
double plaquette_value(const ScalarField& psi, Point2 p);

// Lattice London problem: the stream minimising
//   1/2 sum_e w_e theta_e^2 + 1/2 sum_P w_P h^2 (curl_P - 1)^2,
// i.e. xi0 with the boundary condition carried by the lattice itself.
ScalarField london_stream(GridPtr grid);
// Lattice zeta_(a,d): minimiser of the same quadratic part plus
// 2 pi sum d_i psi(a_i).
ScalarField zeta_stream(const VortexConfig& config, GridPtr grid);

struct AvReport {
  int newton_steps = 0;
  int cg_iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

// Minimiser of F(v, .) over Coulomb-gauge potentials, as a stream function
// (Newton with a biharmonic preconditioner). Throws SolverError if Newton
// does not converge.
ScalarField solve_A_v_stream(const ComplexField& v, const ScalarField& U, double hex, AvReport* report = nullptr,
                             double tolerance = 1e-9);
EdgeField solve_A_v(const ComplexField& v, const ScalarField& U, double hex, AvReport* report = nullptr,
                    double tolerance = 1e-9);

// Test configuration: canonical phase times prod f(|x - z_i| / eps) with the
// radial vortex profile f, and A = hex grad_perp xi0 + grad_perp zeta_(z,1).
// Throws ValidationError for degrees other than +1 or points closer than 8 eps.
// xi0_stream defaults to london_stream(grid).
GLState build_test_configuration(const VortexConfig& config, const LondonData& london, const ScalarField& U,
                                 double epsilon, double hex, const ScalarField* xi0_stream = nullptr);

struct MinimizeOptions {
  enum class Method { lbfgs, flow };
  Method method = Method::lbfgs;
  int max_sweeps = 20000;
  double rel_decrease = 1e-9;  // per sweep, held for `patience` sweeps
  int patience = 5;
  int memory = 8;
  double grad_tol = 1e-9;      // preconditioned gradient norm relative to |F|
  bool trace = true;
};

struct TracePoint {
  int sweep = 0;
  double energy = 0.0;
  double min_abs_v = 0.0;
};

struct MinimizeReport {
  int sweeps = 0;
  bool converged = false;
  bool stalled = false;
  double energy = 0.0;
  double max_abs_v_before_clip = 0.0;
  std::vector<TracePoint> trace;
};

// Minimises F over (v, A) with A in Coulomb gauge (stream parametrisation).
// |v| is clipped to 1 at the end, which does not raise the energy.
GLState minimize(const GLState& s0, const MinimizeOptions& opt = {}, MinimizeReport* report = nullptr);

struct DecompositionReport {
  double F_full = 0.0;     // F(v, A)
  double hex2_J0 = 0.0;
  double F_v = 0.0;        // F(v)
  double point_terms = 0.0;  // 2 pi hex sum d xi0(a) + 2 pi sum d zeta(a)
  double zeta_energy = 0.0;  // 1/2 int (Lap zeta)^2 + |grad zeta|^2
  double rhs = 0.0;
  double residual = 0.0;
  double relative = 0.0;   // |residual| / F_full
};

// zeta = xi - hex xi0 with A = grad_perp xi (A must be in Coulomb gauge); xi0
// is the lattice London stream, J0 the London value.
DecompositionReport decomposition_check(const GLState& s, const VortexConfig& config, const LondonData& london,
                                        const ScalarField* xi0_stream = nullptr);

// Everything the desk experiment needs at one resolution.
struct DeskLevel {
  GridPtr grid;
  PinningField pinning;
  ScalarField U;
  LondonData london;
  ScalarField xi0_stream;
};
DeskLevel prepare_level(const DomainSpec& domain, int n, const PinningSpec& pinning);

// Bilinear transfer of v and of the stream of A - hex grad_perp xi0 from the
// level `from` to a finer level.
GLState prolong(const GLState& coarse, const DeskLevel& from, const DeskLevel& fine);

}  // namespace glpin
