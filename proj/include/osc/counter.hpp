#pragma once

// Renormalized-oscillation eigenvalue counting: frame-pair assembly, Maslov
// box traversals, nullity-sum cross-check, spectral-curve tracing, and
// eigenvalue location refinement.

#include <optional>

#include "osc/maslov.hpp"
#include "osc/niessen.hpp"

namespace osc {

struct CountRequest {
  const HamiltonianSystem* sys = nullptr;
  double lambda1 = 0, lambda2 = 0;   // count over [lambda1, lambda2)
  BoundarySpec left_spec;            // boundary data at the left endpoint
  BoundarySpec right_spec;           // boundary data at the right endpoint
  // Truncation window and probe geometry.
  double window_lo = 0, window_hi = 0;
  double probe_left = 0, probe_right = 0;  // probe points for singular ends
  double base_c = 0;                        // fundamental-matrix base point
  double x_step = 1e-3;
  double lambda_step = 5e-3;
  IntegratorConfig integ;
  MaslovOptions maslov;
  int window_growths = 3;  // stabilization: unchanged index over this many
  // Seed lambdas (eigenvalue estimates) for resolving the narrow phase
  // swings of lambda-paths at large x; computed on demand when empty.
  std::vector<double> lambda_seeds;
  // The top shelf of the Maslov box runs at the largest x where its
  // crossings are still resolvable in double precision.
  bool limit_box_top = true;
};

struct ShelfResult {
  std::string name;            // bottom / right / top / left
  MaslovPathResult path;       // parameter increasing
  int oriented_sign = +1;      // contour orientation factor
  int oriented_index() const { return oriented_sign * path.index; }
};

struct MaslovBoxResult {
  ShelfResult bottom, right, top, left;
  int closure_sum = 0;  // oriented sum; 0 by homotopy invariance
  double window_lo = 0, window_hi = 0;  // the box actually computed
  std::vector<double> seeds_used;
};

enum class EqualityStatus { Equality, InequalityOnly, Undetermined };

struct CountResult {
  int count = 0;                   // N([lambda1, lambda2))
  int principal_index = 0;         // left-shelf Maslov index
  int bottom_correction = 0;       // lambda-dependent-alpha correction
  std::vector<Crossing> crossings; // left-shelf crossings (x positions)
  EqualityStatus equality = EqualityStatus::Undetermined;
  double nonintersection_margin = 0;
  bool window_stable = false;
  bool lambda2_is_eigenvalue = false;
  std::vector<std::string> notes;
};

struct SpectralCurvePoint {
  double lambda, x;
  int multiplicity;
};

struct SpectralCurve {
  int id = 0;
  std::vector<SpectralCurvePoint> points;  // ordered by lambda
  std::optional<double> intercept;         // bottom-shelf lambda intercept
  bool fragmented = false;
};

struct SpectralCurveSet {
  std::vector<SpectralCurve> curves;
  std::vector<double> intercepts;  // eigenvalue estimates, ascending
};

// Frames for one lambda on demand; caches lying-frame construction.
class FramePairFactory {
 public:
  FramePairFactory(const CountRequest& req);
  // Left/right lying frame paths at the given lambda over the window.
  const FramePath& left(double lambda) const;
  const FramePath& right(double lambda) const;
  const CountRequest& req() const { return req_; }

 private:
  const CountRequest& req_;
  mutable std::vector<std::pair<double, FramePath>> left_cache_, right_cache_;
  const FramePath& get(EndSide side, double lambda) const;
};

CountResult count_eigenvalues(const CountRequest& req);

// Sum over detected crossings of dim ker X_left* J X_right; must equal the
// principal Maslov index under monotonicity.
int count_via_nullity_sum(const CountRequest& req);

MaslovBoxResult maslov_box(const CountRequest& req);

SpectralCurveSet trace_spectral_curves(const CountRequest& req,
                                       double intercept_tol = 1e-4);

struct NonintersectionCheck {
  bool holds = false;
  double margin = 0;
  double worst_lambda = 0;
};
NonintersectionCheck endpoint_nonintersection_check(const CountRequest& req,
                                                    EndSide side, double c,
                                                    int lambda_points = 16);

struct TriangleCheck {
  int diagonal = 0;      // both frames varying in lambda
  int right_varying = 0; // left frame pinned at lambda1
  int left_varying = 0;  // right frame pinned at lambda2
  bool identity_holds = false;
};
TriangleCheck triangle_decomposition_check(const CountRequest& req, double c);

}  // namespace osc
