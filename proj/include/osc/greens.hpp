#pragma once

// Truncated-interval Green's function for J y' - B y = B_lambda f with a
// boundary matrix gamma at the left truncation point and a right coordinate
// frame R^b, used as an independent oracle for the frame and boundary
// machinery.

#include "osc/hamiltonian.hpp"
#include "osc/propagator.hpp"

namespace osc {

struct GreensAssembly {
  double lambda = 0;
  double c = 0, b_prime = 0;  // truncation [c, b']
  Matrix gamma;               // n x 2n, rank n, gamma J gamma* = 0
  Matrix Rb;                  // 2n x n Lagrangian coordinate frame at c
  Matrix E;                   // (J gamma*  Rb), 2n x 2n
  Matrix M;                   // E^{-1} J E^{-*}, anti-Hermitian
  double E_condition = 0;
  std::shared_ptr<ProbePath> flow;  // Phi(.; 0, lambda) based at c
  std::function<Matrix(double)> B, Bl;  // coefficients at this lambda
};

// gamma = Rb* (valid: gamma J gamma* = 0, gamma Rb = Rb* Rb nonsingular).
Matrix choose_gamma(const Matrix& rb);

GreensAssembly make_greens_assembly(const HamiltonianSystem& sys,
                                    double lambda, double c, double b_prime,
                                    const Matrix& gamma, const Matrix& rb,
                                    const IntegratorConfig& cfg = {});

// Two-branch kernel G(x, xi).
Matrix greens_kernel(const GreensAssembly& g, double x, double xi);

struct InhomogeneousSolution {
  std::vector<double> xs;
  std::vector<Vector> y;
  double max_ode_residual = 0;       // weighted ||J y' - B y - B_l f||
  double boundary_residual_left = 0;  // |gamma y(c)|
  double boundary_residual_right = 0; // right frame form at b'
};

// y(x) = \int_c^{b'} G(x, xi) B_lambda(xi) f(xi) dxi with adaptive composite
// Gauss quadrature split at xi = x; residuals verified on the sample grid.
InhomogeneousSolution solve_inhomogeneous(
    const GreensAssembly& g, const std::function<Vector(double)>& f,
    const std::vector<double>& xs, int panels = 64);

}  // namespace osc
