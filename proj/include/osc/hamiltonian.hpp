#pragma once

// Representation of the linear Hamiltonian system J y' = B(x; lambda) y on an
// interval (a, b), with the lambda-derivative weight B_lambda(x; lambda),
// endpoint kinds, optional boundary matrix alpha(lambda) at a regular end,
// and sampled checkers for the structural assumptions the counting theory
// needs.

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "osc/linalg.hpp"

namespace osc {

enum class EndpointKind { Regular, Singular };
enum class EndSide { Left, Right };

// Coefficient families with a known residual map E(x; lambda, lambda*)
// solving B(x;l) - B(x;l*) = B_lambda(x;l*) E.
enum class CoefficientClass {
  Linear,
  QuadraticSchrodinger,
  DegenerateSturmLiouville,
  Mhd,
  Custom,
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HamiltonianSystem {
  int n = 1;           // half-dimension; state lives in C^{2n}
  double a = 0.0;      // left endpoint (may be -inf)
  double b = kInf;     // right endpoint (may be +inf)
  EndpointKind a_kind = EndpointKind::Singular;
  EndpointKind b_kind = EndpointKind::Singular;

  std::function<Matrix(double, double)> B;         // (x, lambda) -> 2n x 2n
  std::function<Matrix(double, double)> B_lambda;  // (x, lambda) -> 2n x 2n

  std::array<double, 2> lambda_domain{-1.0, 1.0};  // validated band
  std::array<double, 2> count_interval{-1.0, 1.0};  // default [l1, l2]

  // Boundary matrix alpha(lambda) (n x 2n) at a regular endpoint, if any.
  std::optional<std::function<Matrix(double)>> alpha;
  EndSide alpha_side = EndSide::Left;

  CoefficientClass coeff_class = CoefficientClass::Custom;
  // Class-specific residual map; empty for Custom.
  std::function<Matrix(double, double, double)> residual_E;

  std::string name = "custom";

  int dim() const { return 2 * n; }
  bool lambda_in_domain(double l) const {
    return l >= lambda_domain[0] && l <= lambda_domain[1];
  }
  EndpointKind kind(EndSide s) const {
    return s == EndSide::Left ? a_kind : b_kind;
  }
  double endpoint(EndSide s) const { return s == EndSide::Left ? a : b; }
};

// ---- builders (spec'd coefficient classes) ----------------------------------

using MatrixFn = std::function<Matrix(double)>;

// B(x; l) = B0(x) + l B1(x); B1 must be non-negative on samples.
HamiltonianSystem build_linear_pencil(MatrixFn b0, MatrixFn b1, double a,
                                      double b,
                                      std::array<double, 2> lambda_domain,
                                      const std::vector<double>& sample_xs);

// Second-order system -phi'' + V phi = (l Q1 + l^2 Q2) phi written first
// order: B = diag(l Q1 + l^2 Q2 - V, I), B_lambda = diag(Q1 + 2 l Q2, 0).
// Requires Q1 + 2 l Q2 >= theta > 0 on the sampled (x, lambda) grid.
HamiltonianSystem build_quadratic_schrodinger(
    MatrixFn v, MatrixFn q1, MatrixFn q2, double a, double b,
    std::array<double, 2> lambda_domain, const std::vector<double>& sample_xs,
    int lambda_samples = 25);

// Reduced degenerate Sturm-Liouville block system:
// B = diag(l I - V(x;l), P11^{-1}),  V = V11 + V12 (l I - V22)^{-1} V12*.
// Every sampled eigenvalue of V22 must stay outside
// [lambda1 - delta, lambda2 + delta] for some delta > 0.
HamiltonianSystem build_degenerate_sturm_liouville(
    MatrixFn p11, MatrixFn v11, MatrixFn v12, MatrixFn v22, int m, int n_total,
    double a, double b, std::array<double, 2> lambda_domain,
    const std::vector<double>& sample_xs);

// ---- assumption checking -----------------------------------------------------

enum class CheckStatus { Pass, Fail, NotCheckable };

struct AssumptionCheck {
  std::string label;      // "A", "A'", "B", "C", "D", "E", "F"
  CheckStatus status = CheckStatus::NotCheckable;
  double worst_defect = 0.0;
  double witness_x = 0.0;
  double witness_lambda = 0.0;
  std::string note;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  std::vector<double> x_grid;
  std::vector<double> lambda_grid;
  bool all_checkable_pass() const;
  const AssumptionCheck* find(const std::string& label) const;
};

class Propagator;  // fwd (assumption B integrates sample solutions)

AssumptionReport check_assumptions(const HamiltonianSystem& sys,
                                   const std::vector<double>& x_grid,
                                   const std::vector<double>& lambda_grid);

// Class-specific residual map E(x; l, l*); throws ValidationError for
// Custom systems without one (reported as not-checkable by callers).
Matrix residual_map_E(const HamiltonianSystem& sys, double x, double lambda,
                      double lambda_star);

// Default sampling grids: log-spaced near singular endpoints, uniform in
// lambda.
std::vector<double> default_x_grid(const HamiltonianSystem& sys,
                                   int points = 200);
std::vector<double> default_lambda_grid(const HamiltonianSystem& sys,
                                        int points = 50);

}  // namespace osc
