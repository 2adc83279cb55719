#pragma once

// Built-in problem families: the hydrogen-type quadratic Schrodinger family,
// the Hain-Lust cylindrical MHD system, and the Saint-Venant shock-linearization
// form with injected coefficients.

#include <optional>
#include <string>

#include "osc/hamiltonian.hpp"

namespace osc {

struct HydrogenParams {
  double gamma = 4.0;
  double delta = 0.0;
  std::array<double, 2> lambda_domain{-3.0, -7.0 / 12.0};
};

HamiltonianSystem hydrogen_system(const HydrogenParams& p = {});

// Reference eigenvalues -gamma/(2k), k = 1..count (delta = 0 case).
std::vector<double> hydrogen_exact_eigenvalues(double gamma, int count);

struct MhdParams {
  double b = 0.01;   // cylinder radius
  int m = -1;        // azimuthal wavenumber (nonzero)
  int k = 1;         // axial wavenumber
  double B0 = 10.0;  // field amplitude; F(0) = B0 (m kappa + k)
  double kappa = 0.9;
  double rho0 = 1.0;
  double mu0 = 1.0;
  std::array<double, 2> lambda_domain{-1.1, -1.03};
};

struct MhdCoefficients {
  double P, V;       // second-order form coefficients
  double F, G;       // field combinations
  Matrix B;          // 2x2 system matrix diag(V, -1/P)
};

HamiltonianSystem mhd_system(const MhdParams& p = {});
MhdCoefficients mhd_coefficients(const MhdParams& p, double x, double lambda);

// Frobenius exponent r(mu; lambda) at the regular singular point x = 0.
double mhd_frobenius_exponent(const MhdParams& p, double lambda, double mu);

struct SaintVenantProblem {
  std::function<double(double)> v;   // coefficients on (-inf, 0]
  std::function<double(double)> q1;  // <= -delta
  std::function<double(double)> q2;  // <= -delta
  double c1 = 0.0;
  double c2 = -1.0;  // must be negative
  std::array<double, 2> lambda_domain{0.0, 1.0};
  double x_max = 40.0;  // usable horizon on the reflected half-line
};

// System on [0, inf) (reflected variable) with
// B = diag(-v(-x) - q1(-x) l - q2(-x) l^2, -1) and lambda-dependent boundary
// matrix alpha(l) = ((c1 + c2 l), -1) at the regular left endpoint.
HamiltonianSystem saint_venant_system(const SaintVenantProblem& p);

// Synthetic constant-coefficient Saint-Venant test set (non-physical; for
// machinery tests only).
SaintVenantProblem saint_venant_synthetic();

// ---- JSON problem configuration ----------------------------------------------
// Keys: "class" (hydrogen | mhd | saint-venant-synthetic), "lambda_domain",
// class parameters ("gamma", "delta"; "b", "m", "k", "B0", "kappa", "rho0",
// "mu0"; "c1", "c2").  Throws ValidationError on malformed input.
HamiltonianSystem problem_from_json(const std::string& json_text);

}  // namespace osc
