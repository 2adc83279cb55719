#pragma once

// Endpoint classification and singular boundary data via eigenvalue limits of
// the endpoint probe matrices, Niessen element selection on the beta-circle,
// boundary forms, and construction of the left/right-lying solution frames.

#include <optional>
#include <variant>

#include "osc/hamiltonian.hpp"
#include "osc/propagator.hpp"

namespace osc {

enum class ProbeKind {
  ImagShift,   // (1/(2 Im mu)) Phi* (J/i) Phi, Im mu != 0
  RealLambda,  // \int_c^x Phi* B_lambda Phi, mu = 0
};

struct ProbePoint {
  double x;
  RealVector values;  // ascending
  Matrix vectors;     // index-matched columns (see NiessenProbe)
};

struct NiessenProbe {
  EndSide side;
  ProbeKind kind;
  Complex mu;       // 0 for RealLambda
  double lambda;
  double base_c;    // Phi(base_c) = I
  std::vector<ProbePoint> points;  // ordered toward the endpoint
  bool matching_ambiguous = false; // eigenvector overlap < 0.5 somewhere
  double min_overlap = 1.0;
  std::shared_ptr<ProbePath> prop; // fundamental matrix + weight integral
  Matrix probe_matrix(double x) const;
};

// Evaluate the probe along `probe_xs` (ordered toward the endpoint), matching
// eigenpaths by maximal eigenvector overlap between consecutive points.
NiessenProbe eigen_probe(const HamiltonianSystem& sys, Complex mu,
                         double lambda, double c,
                         const std::vector<double>& probe_xs, EndSide side,
                         const IntegratorConfig& cfg = {});

// Geometric probe ladder toward an endpoint: for a finite singular endpoint,
// offsets eps * 10^k; for an infinite one, fractions of the horizon.
std::vector<double> default_probe_points(const HamiltonianSystem& sys,
                                         EndSide side, double eps,
                                         double horizon, int count = 4);

enum class LimitCase { LimitPoint, LimitCircle, LimitM };

struct EndpointClassification {
  int m = 0;                     // count of finite-limit eigenpaths
  LimitCase label = LimitCase::LimitPoint;
  std::vector<int> finite_paths;     // indices into probe point rows
  std::vector<int> divergent_paths;  // with growth estimates
  std::vector<double> growth;        // per divergent path: last |value| ratio
  std::vector<double> limits;        // per finite path: extrapolated limit
  bool low_confidence = false;
  std::string note;
};

EndpointClassification classify_endpoint(const NiessenProbe& probe,
                                         double decision_tol = 1e-3);

// Niessen elements at (mu0, lambda0): coordinates R (2n x n) of the selected
// lying solutions u_j = Phi r_j, beta on the admissibility circle, and
// complements with |gamma| = |beta|, gamma != beta (default gamma = -beta).
struct NiessenElementSet {
  Complex mu0;
  double lambda0 = 0;
  EndSide side;
  Matrix R;            // 2n x n coordinates of u_1..u_n
  Matrix complements;  // 2n x r coordinates of v_1..v_r
  std::vector<Complex> beta;   // size r
  std::vector<Complex> gamma;  // size r
  std::vector<double> nu_low, nu_high;  // paired eigenvalue limits
  int r = 0;
};

NiessenElementSet niessen_elements(const NiessenProbe& probe,
                                   const EndpointClassification& cls,
                                   std::optional<std::vector<Complex>>
                                       beta_override = std::nullopt);

// lim U(x)* J y(x) at the probe's endpoint, Richardson-extrapolated over the
// last probe points.  U_coords / y_coords are coordinate matrices at base_c.
struct BoundaryFormResult {
  Vector value;
  double error_estimate = 0;
  bool divergent = false;
};
BoundaryFormResult boundary_form(const NiessenProbe& probe,
                                 const Matrix& u_coords,
                                 const Vector& y_coords);

// Solve for the circle element beta that makes the physically-targeted
// solution satisfy the singular boundary condition:
//   (Phi(eps; mu0, l0)(v1 + beta v2))* J Phi(eps; 0, lambda_ref) w = 0,
// where w is the coordinate vector of the solution with value `target` at
// eps.  Returns beta plus the residual of the solved condition.
struct PhysicalBetaResult {
  Complex beta;
  double residual = 0;
  double circle_radius = 0;   // |beta| prescribed by the eigenvalue ratio
  double off_circle = 0;      // relative deviation of |beta| from it
};
PhysicalBetaResult physical_beta(const HamiltonianSystem& sys,
                                 double lambda_ref, const Vector& target,
                                 double eps, const NiessenProbe& probe_a,
                                 const EndpointClassification& cls,
                                 const IntegratorConfig& cfg = {});

// ---- lying frames -------------------------------------------------------------

struct RegularAlphaSpec {};           // use sys.alpha at the regular endpoint
struct PhysicalVectorSpec {           // prescribed solution value at offset eps
  Vector target;
  double eps;
};
struct NiessenDataSpec {              // singular boundary condition from U-data
  NiessenElementSet elements;
  double eps;                         // enforcement offset
};
using BoundarySpec =
    std::variant<std::monostate, RegularAlphaSpec, PhysicalVectorSpec,
                 NiessenDataSpec>;

// Construct the frame of solutions lying toward `side` at spectral point
// lambda, covering [window_lo, window_hi].  For limit-point singular ends no
// boundary spec is needed; regular ends take RegularAlphaSpec; limit-circle
// ends take PhysicalVectorSpec or NiessenDataSpec.
FramePath lying_frame(const HamiltonianSystem& sys, double lambda,
                      EndSide side, const BoundarySpec& spec, double probe_x,
                      double base_c, double window_lo, double window_hi,
                      const IntegratorConfig& cfg = {});

struct FrameConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace osc
