#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace glpin::kernels {

using cplx = std::complex<double>;

// Thread count taken from GLPIN_THREADS (if set) at first use.
int thread_count();
void set_thread_count(int n);

// Reductions are computed over fixed-size blocks and the partial sums are added
// in block order, so results do not depend on the thread count.
double dot(std::span<const double> a, std::span<const double> b);
double dot_serial(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_serial(double alpha, std::span<const double> x, std::span<double> y);
// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);

// Row of a 5-point stencil on interior unknowns: y = diag*x - sum(x[nbr]).
// nbr holds 4 entries per row, -1 for a missing neighbour.
struct Stencil5 {
  std::span<const double> diag;
  std::span<const int> nbr;
};
void apply(const Stencil5& s, std::span<const double> x, std::span<double> y);
void apply_serial(const Stencil5& s, std::span<const double> x, std::span<double> y);

// Finite-volume lattice energy
//   1/2 sum_e c_e |v_j e^{-i theta_e} - v_i|^2 + sum_i p_i (t_i - |v_i|^2)^2
//   + 1/2 sum_P w_P h^2 (curl_P - hex)^2,
// curl_P = (theta_x(i,j) + theta_y(i+1,j) - theta_x(i,j+1) - theta_y(i,j)) / h^2.
// Empty theta spans mean theta = 0 and no field term.
struct LatticeProblem {
  int nx = 0;
  int ny = 0;
  double h = 1.0;
  std::span<const double> cx, cy;   // edge kinetic coefficients
  std::span<const double> pot;      // node potential coefficients
  std::span<const double> target;   // node potential targets
  std::span<const double> plaq_w;   // plaquette weights (field term)
  double hex = 0.0;
};

struct LatticeTerms {
  double kinetic = 0.0;
  double potential = 0.0;
  double field = 0.0;
  double total() const { return kinetic + potential + field; }
};

// Gradient outputs are optional (empty span = not requested). grad_v holds
// (dE/dRe v, dE/dIm v) as a complex number; grad_tx/ty are dE/dtheta.
struct LatticeGradient {
  std::span<cplx> v;
  std::span<double> tx;
  std::span<double> ty;
};

LatticeTerms lattice_energy(const LatticeProblem& p, std::span<const cplx> v,
                            std::span<const double> tx, std::span<const double> ty,
                            LatticeGradient grad = {});
// Reference version: plain loops, per-edge scatter into the gradient.
LatticeTerms lattice_energy_serial(const LatticeProblem& p, std::span<const cplx> v,
                                   std::span<const double> tx, std::span<const double> ty,
                                   LatticeGradient grad = {});

}  // namespace glpin::kernels
