#pragma once

// Adaptive Dormand-Prince 5(4) integration of J Phi' = (B + mu B_lambda) Phi
// and of 2n x n frame evolutions, with dense output kept for later
// evaluation at arbitrary points, symplecticity monitoring, and column
// renormalization for frames.

#include <functional>
#include <memory>
#include <vector>

#include "osc/hamiltonian.hpp"
#include "osc/linalg.hpp"

namespace osc {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = kInf;
  double sympl_tol = 1e-8;
  // Columns of evolving frames are re-orthonormalized when any column norm
  // leaves [norm_lo, norm_hi].
  double norm_lo = 1e-6;
  double norm_hi = 1e6;
  // Near a singular endpoint at x = 0 the step magnitude floors at
  // singular_floor * x to avoid underflow.
  double singular_floor = 0.1;
  std::size_t max_steps = 2'000'000;
};

struct IntegrationError : std::runtime_error {
  double last_x;
  IntegrationError(const std::string& what, double x)
      : std::runtime_error(what), last_x(x) {}
};

// One accepted step with the quartic dense-output interpolant of DP5.
struct DenseStep {
  double x0, h;                 // step from x0 to x0 + h (h may be negative)
  std::vector<Vector> coeff;    // 5 interpolation coefficient vectors
  Vector eval(double x) const;  // valid for x between x0 and x0+h
};

// Piecewise-dense trajectory of a vectorized state.  Steps are ordered by
// traversal; x may run in either direction.
class DensePath {
 public:
  void push(DenseStep step) { steps_.push_back(std::move(step)); }
  bool empty() const { return steps_.empty(); }
  double x_begin() const;
  double x_end() const;
  bool covers(double x) const;
  Vector eval(double x) const;
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<DenseStep> steps_;
  const DenseStep& locate(double x) const;
};

// Right-hand side of a linear ODE y' = F(x) y acting on a vectorized matrix
// state; `derivative` maps (x, state) -> state'.
using RhsFn = std::function<Vector(double, const Vector&)>;

enum class StepAction { Continue, StateChanged, Stop };
using PostStepFn = std::function<StepAction(double, Vector&)>;

// Core driver: integrates from x0 to x1 (either direction), storing dense
// output.  `post_step` (optional) runs after each accepted step and may
// transform the state (StateChanged) or end the sweep early (Stop).
// `end_x` receives the x actually reached.
DensePath integrate_dense(const RhsFn& rhs, Vector y0, double x0, double x1,
                          const IntegratorConfig& cfg,
                          const PostStepFn& post_step = {},
                          bool floor_toward_zero = false,
                          double* end_x = nullptr);

// ---- fundamental matrix + accumulated weight --------------------------------

// Path of Phi(x; mu, lambda) with Phi(c) = I together with the accumulated
// weight integral  \int_c^x Phi* B_lambda Phi dxi  (used by both endpoint
// probe matrices).  States are stored vectorized column-major.
class ProbePath {
 public:
  ProbePath(int dim) : dim_(dim) {}
  Matrix phi(double x) const;
  Matrix weight(double x) const;  // Hermitian 2n x 2n
  double base() const { return base_; }
  double reach() const { return reach_; }
  double sympl_defect() const { return sympl_defect_; }

  int dim_;
  double base_ = 0, reach_ = 0;
  double sympl_defect_ = 0;
  DensePath path_;  // stacked [vec(Phi); vec(W)]
};

// Integrate the fundamental matrix from c to `to`, carrying the weight
// integral.  mu = 0 gives the real-lambda system.
ProbePath integrate_probe(const HamiltonianSystem& sys, Complex mu,
                          double lambda, double c, double to,
                          const IntegratorConfig& cfg);

struct FundamentalSample {
  double x;
  Matrix phi;
};

struct FundamentalMatrixPath {
  double base_point;
  Complex mu;
  double lambda;
  std::vector<FundamentalSample> samples;
  double sympl_defect_max = 0;
};

// Fundamental matrix at the given sorted targets (base point c anywhere
// relative to them); symplectic defect monitored against cfg.sympl_tol.
FundamentalMatrixPath fundamental_matrix(const HamiltonianSystem& sys,
                                         Complex mu, double lambda, double c,
                                         const std::vector<double>& targets,
                                         const IntegratorConfig& cfg = {});

// ---- frame evolution ---------------------------------------------------------

// Lagrangian frame path X(x) solving J X' = B(x; lambda) X, stored densely
// per renormalization segment.  eval() returns a frame whose span is the
// solution span at x; column scaling is only consistent within a segment.
class FramePath {
 public:
  FramePath(int dim, int ncols) : dim_(dim), ncols_(ncols) {}
  Matrix eval(double x) const;
  double x_begin() const;
  double x_end() const;
  bool covers(double x) const;
  double lambda = 0;

  int dim_, ncols_;
  std::vector<DensePath> segments_;   // ordered by traversal
  std::vector<double> seg_starts_;    // traversal-start x of each segment
};

// Evolve a frame from (x0, F0) over the whole range [lo, hi] (resp. the
// traversal order implied by x0 being one of the ends).  If x0 is interior,
// two sweeps are stored.
FramePath evolve_frame(const HamiltonianSystem& sys, double lambda, Matrix f0,
                       double x0, double lo, double hi,
                       const IntegratorConfig& cfg = {});

// Convenience: frame samples at sorted targets.
std::vector<Matrix> frame_at(const FramePath& path,
                             const std::vector<double>& xs);

}  // namespace osc
