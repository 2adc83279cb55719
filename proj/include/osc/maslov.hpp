#pragma once

// Maslov index of a pair of Lagrangian-frame paths, computed as the spectral
// flow of the associated unitary matrix through -1, with the endpoint and
// persistent-intersection conventions of renormalized oscillation theory.

#include <functional>

#include "osc/linalg.hpp"

namespace osc {

// W = -(X1 + iY1)(X1 - iY1)^{-1} (X2 - iY2)(X2 + iY2)^{-1}; unitary, and
// dim(span F1 ∩ span F2) = dim ker(W + I).
Matrix relative_unitary(const Matrix& f1, const Matrix& f2);

// Intersection dimension via the eigenvalue count of W near -1, cross-checked
// against the rank deficiency of F1* J F2.  Throws on disagreement.
int intersection_dim(const Matrix& f1, const Matrix& f2,
                     double angle_tol = 1e-6);

struct UnitaryFlowSample {
  double t;
  Matrix w;                  // n x n unitary
  Eigen::VectorXd phases;    // continuously unwrapped along the path
};

enum class CrossingBoundary { Interior, Departure, Arrival };

struct Crossing {
  double t = 0;
  int multiplicity = 1;
  int direction = 0;  // +1 counterclockwise, -1 clockwise, 0 undetermined
  CrossingBoundary boundary = CrossingBoundary::Interior;
  bool counted = true;  // false for convention-excluded endpoint events
};

struct MaslovPathResult {
  static constexpr double kPi = 3.14159265358979323846;
  std::vector<Crossing> crossings;
  int index = 0;
  double min_gap_to_minus_one = kPi;  // min over samples of min_j |phase - pi|
  int persistent_paths = 0;  // eigenphases pinned at -1 over the whole path
  std::vector<UnitaryFlowSample> samples;  // sparse record
};

struct FramePairPath {
  // Frames of both paths at parameter t.
  std::function<std::pair<Matrix, Matrix>(double)> frames;
  double t0, t1;
};

struct MaslovOptions {
  int initial_samples = 64;
  std::vector<double> initial_ts;  // explicit initial grid (overrides count)
  // Rotation prior for unwrapping: 0 none (nearest-branch), -1 when all
  // crossings are known to be clockwise (monotone lambda shelves), +1 for
  // counterclockwise.  A multi-radian monotone drop between samples aliases
  // to a small move of the opposite sign without this.
  int monotone = 0;
  double angle_snap = 1e-6;    // |phase - pi| below this counts as "at -1"
  double max_phase_step = 1.3; // refine when a matched phase moves more
  int max_refine_depth = 48;
  double t_tol = 0.0;          // crossing location tolerance; 0 -> auto
};

// Maslov index of the frame-pair path over [t0, t1].
MaslovPathResult maslov_index_path(const FramePairPath& path,
                                   const MaslovOptions& opt = {});

// Crossing direction near t_star from the definiteness of -X1* J X1' and
// X2* J X2' (finite differences); falls back to the phase slope.  `which`
// selects which frames vary: 0 both, 1 first only, 2 second only (the other
// derivative is treated as zero).
int crossing_direction(const FramePairPath& path, double t_star, double dt,
                       int which = 0);

struct UnresolvablePathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace osc
