#include "osc/niessen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace osc {

namespace {

// Greedy eigenpath matching: permute the new eigenpairs so column k follows
// the old column k (maximal |<old_k, new_j>|).  Returns the smallest overlap
// accepted.
double match_columns(const Matrix& old_vecs, RealVector& vals, Matrix& vecs) {
  const int n = static_cast<int>(vecs.cols());
  std::vector<int> taken(n, 0);
  std::vector<int> perm(n, -1);
  double min_overlap = 1.0;
  // Pair greedily by descending overlap to avoid order bias.
  std::vector<std::tuple<double, int, int>> scores;
  scores.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      scores.emplace_back(std::abs(old_vecs.col(i).dot(vecs.col(j))), i, j);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  int assigned = 0;
  for (const auto& [s, i, j] : scores) {
    if (perm[i] >= 0 || taken[j]) continue;
    perm[i] = j;
    taken[j] = 1;
    min_overlap = std::min(min_overlap, s);
    if (++assigned == n) break;
  }
  RealVector new_vals(n);
  Matrix new_vecs(vecs.rows(), n);
  for (int i = 0; i < n; ++i) {
    new_vals(i) = vals(perm[i]);
    new_vecs.col(i) = vecs.col(perm[i]);
  }
  vals = new_vals;
  vecs = new_vecs;
  return min_overlap;
}

}  // namespace

Matrix NiessenProbe::probe_matrix(double x) const {
  Matrix w = prop->weight(x);
  if (kind == ProbeKind::ImagShift) {
    const int n = static_cast<int>(w.rows()) / 2;
    const Matrix j = symplectic_j(n);
    w += (j / Complex(0, 1)) / (2.0 * mu.imag());
  }
  return w;
}

std::vector<double> default_probe_points(const HamiltonianSystem& sys,
                                         EndSide side, double eps,
                                         double horizon, int count) {
  std::vector<double> xs;
  const double end = sys.endpoint(side);
  if (std::isfinite(end)) {
    if (sys.kind(side) == EndpointKind::Regular) return {end};
    // offsets eps * 10^k marching toward the endpoint
    for (int k = count - 1; k >= 0; --k) {
      const double off = eps * std::pow(10.0, k);
      xs.push_back(side == EndSide::Left ? end + off : end - off);
    }
  } else {
    // fractions of the horizon, doubling toward it
    for (int k = count - 1; k >= 0; --k) {
      const double v = horizon / std::pow(2.0, k);
      xs.push_back(side == EndSide::Left ? -v : v);
    }
  }
  return xs;
}

NiessenProbe eigen_probe(const HamiltonianSystem& sys, Complex mu,
                         double lambda, double c,
                         const std::vector<double>& probe_xs, EndSide side,
                         const IntegratorConfig& cfg) {
  if (probe_xs.empty()) throw ValidationError("eigen_probe: no probe points");
  const ProbeKind kind =
      mu == 0.0 ? ProbeKind::RealLambda : ProbeKind::ImagShift;
  if (kind == ProbeKind::ImagShift && mu.imag() == 0.0)
    throw ValidationError("eigen_probe: Im mu must be nonzero for the "
                          "imaginary-shift probe");

  NiessenProbe probe;
  probe.side = side;
  probe.kind = kind;
  probe.mu = mu;
  probe.lambda = lambda;
  probe.base_c = c;

  // Farthest probe point defines the sweep.
  const double farthest = side == EndSide::Left
                              ? *std::min_element(probe_xs.begin(), probe_xs.end())
                              : *std::max_element(probe_xs.begin(), probe_xs.end());
  probe.prop = std::make_shared<ProbePath>(
      integrate_probe(sys, mu, lambda, c, farthest, cfg));

  std::vector<double> ordered = probe_xs;
  // Order toward the endpoint.
  std::sort(ordered.begin(), ordered.end());
  if (side == EndSide::Left) std::reverse(ordered.begin(), ordered.end());

  for (double x : ordered) {
    const Matrix m = probe.probe_matrix(x);
    auto eig = hermitian_eigen(m, 1e-6);
    ProbePoint pt{x, eig.values, eig.vectors};
    if (!probe.points.empty()) {
      const double ov =
          match_columns(probe.points.back().vectors, pt.values, pt.vectors);
      probe.min_overlap = std::min(probe.min_overlap, ov);
      if (ov < 0.5) probe.matching_ambiguous = true;
    }
    probe.points.push_back(std::move(pt));
  }
  return probe;
}

EndpointClassification classify_endpoint(const NiessenProbe& probe,
                                         double decision_tol) {
  if (probe.points.size() < 4)
    throw ValidationError("classify_endpoint: need at least 4 probe points");
  EndpointClassification out;
  const int dim = static_cast<int>(probe.points.front().values.size());
  const std::size_t np = probe.points.size();

  for (int j = 0; j < dim; ++j) {
    // Cauchy criterion over the last three probe points.
    const double v2 = probe.points[np - 1].values(j);
    const double v1 = probe.points[np - 2].values(j);
    const double v0 = probe.points[np - 3].values(j);
    const double d21 = std::abs(v2 - v1), d10 = std::abs(v1 - v0);
    const double scale = 1.0 + std::abs(v2);
    const bool cauchy = d21 <= decision_tol * scale && d21 <= d10 + decision_tol * scale;
    const bool diverging = std::abs(v2) > 2.0 * std::abs(v0) + 10.0 &&
                           d21 > d10;
    if (cauchy && !diverging) {
      out.finite_paths.push_back(j);
      // Aitken extrapolation when the differences still resolve.
      const double denom = (v2 - v1) - (v1 - v0);
      out.limits.push_back(std::abs(denom) > 1e-14 * scale
                               ? v2 - (v2 - v1) * (v2 - v1) / denom
                               : v2);
    } else if (std::abs(v2) <=
               1e-10 * probe.points[np - 1].values.cwiseAbs().maxCoeff()) {
      // Value indistinguishable from zero at the scale of the dominant
      // divergent paths: finite by magnitude split, value unresolved.
      out.finite_paths.push_back(j);
      out.limits.push_back(v2);
      out.low_confidence = true;
      out.note = "finite path classified by magnitude split; its value sits "
                 "below the eigensolver floor at this scale";
    } else {
      out.divergent_paths.push_back(j);
      out.growth.push_back(std::abs(v1) > 0 ? std::abs(v2) / std::abs(v1)
                                            : kInf);
      if (!diverging && !cauchy) {
        out.low_confidence = true;
        out.note = "path neither Cauchy nor clearly divergent";
      }
    }
  }
  out.m = static_cast<int>(out.finite_paths.size());
  const int n = dim / 2;
  out.label = out.m <= n       ? LimitCase::LimitPoint
              : out.m == dim   ? LimitCase::LimitCircle
                               : LimitCase::LimitM;
  if (probe.matching_ambiguous) {
    out.low_confidence = true;
    out.note += (out.note.empty() ? "" : "; ");
    out.note += "eigenpath matching ambiguous (overlap < 0.5)";
  }
  return out;
}

NiessenElementSet niessen_elements(
    const NiessenProbe& probe, const EndpointClassification& cls,
    std::optional<std::vector<Complex>> beta_override) {
  const int dim = static_cast<int>(probe.points.front().values.size());
  const int n = dim / 2;
  const int r = cls.m - n;
  if (r < 0)
    throw FrameConstructionError(
        "fewer than n finite-limit paths: cannot select Niessen elements");

  NiessenElementSet set;
  set.mu0 = probe.mu;
  set.lambda0 = probe.lambda;
  set.side = probe.side;
  set.r = r;

  const ProbePoint& last = probe.points.back();
  auto val = [&](int k) { return last.values(k); };
  auto vec = [&](int k) { return last.vectors.col(k); };

  // Eigenvalues stay ascending-labeled.  At the right endpoint the finite
  // paths are the bottom m and the doubly-integrable subspaces pair
  // (j, n+j), j < r.  At the left endpoint the finite paths are the top m
  // and the pairs straddle the spectrum as (n-r+j, 2n-r+j); the unpaired
  // lying solutions are the remaining finite indices.
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> single;
  if (probe.side == EndSide::Right) {
    for (int j = 0; j < r; ++j) pairs.emplace_back(j, n + j);
    for (int j = r; j < n; ++j) single.push_back(j);
  } else {
    for (int j = 0; j < r; ++j) pairs.emplace_back(n - r + j, 2 * n - r + j);
    for (int j = n; j < 2 * n - r; ++j) single.push_back(j);
  }

  set.R = Matrix(dim, n);
  set.complements = Matrix(dim, std::max(r, 0));
  int col = 0;
  for (int j = 0; j < r; ++j, ++col) {
    const auto [lo, hi] = pairs[j];
    const double nu_lo = val(lo), nu_hi = val(hi);
    const double ratio = -nu_lo / nu_hi;
    if (!(std::abs(nu_hi) > 1e-300) || !(ratio > 0))
      throw FrameConstructionError(
          "degenerate eigenvalue ratio in the beta-circle radius");
    const double radius = std::sqrt(ratio);
    Complex beta = beta_override && j < static_cast<int>(beta_override->size())
                       ? (*beta_override)[j]
                       : Complex(radius, 0.0);
    Complex gamma = -beta;
    set.beta.push_back(beta);
    set.gamma.push_back(gamma);
    set.nu_low.push_back(nu_lo);
    set.nu_high.push_back(nu_hi);
    set.R.col(col) = vec(lo) + beta * vec(hi);
    set.complements.col(j) = vec(lo) + gamma * vec(hi);
  }
  for (int idx : single) set.R.col(col++) = vec(idx);
  return set;
}

BoundaryFormResult boundary_form(const NiessenProbe& probe,
                                 const Matrix& u_coords,
                                 const Vector& y_coords) {
  BoundaryFormResult out;
  const std::size_t np = probe.points.size();
  if (np < 3) throw ValidationError("boundary_form: need >= 3 probe points");
  std::vector<Vector> seq;
  for (const auto& pt : probe.points) {
    const Matrix phi = probe.prop->phi(pt.x);
    seq.push_back((phi * u_coords).adjoint() * apply_j(phi * y_coords));
  }
  // Aitken delta^2 per component over the last three values.
  const Vector& s0 = seq[np - 3];
  const Vector& s1 = seq[np - 2];
  const Vector& s2 = seq[np - 1];
  out.value = Vector(s2.size());
  double err = 0;
  for (Eigen::Index i = 0; i < s2.size(); ++i) {
    const Complex d1 = s1(i) - s0(i), d2 = s2(i) - s1(i);
    const Complex denom = d2 - d1;
    out.value(i) = std::abs(denom) > 1e-14 * (1.0 + std::abs(s2(i)))
                       ? s2(i) - d2 * d2 / denom
                       : s2(i);
    err = std::max(err, std::abs(d2));
    if (std::abs(d2) > 2.0 * std::abs(d1) + 1.0) out.divergent = true;
  }
  out.error_estimate = err;
  return out;
}

PhysicalBetaResult physical_beta(const HamiltonianSystem& sys,
                                 double lambda_ref, const Vector& target,
                                 double eps, const NiessenProbe& probe_a,
                                 const EndpointClassification& cls,
                                 const IntegratorConfig& cfg) {
  const int n = sys.n;
  if (n != 1)
    throw ValidationError("physical_beta: implemented for n = 1 systems");
  if (cls.label != LimitCase::LimitCircle)
    throw ValidationError("physical_beta: endpoint is not limit-circle");

  // Coordinates of the targeted solution at eps for the real-lambda flow.
  const double x_eps = sys.a + eps;
  ProbePath real_flow =
      integrate_probe(sys, 0.0, lambda_ref, probe_a.base_c, x_eps, cfg);
  const Matrix phi_eps = real_flow.phi(x_eps);
  const Vector w = phi_eps.colPivHouseholderQr().solve(target).normalized();

  // Niessen limit vectors at the endpoint, left labeling (descending).
  const ProbePoint& last = probe_a.points.back();
  const Vector v1 = last.vectors.col(0);
  const Vector v2 = last.vectors.col(1);
  const double nu1 = last.values(0), nu2 = last.values(1);
  if (!(nu1 < 0 && nu2 > 0))
    throw ValidationError("physical_beta: unexpected eigenvalue signs");

  const Matrix phi_mu_eps = probe_a.prop->phi(last.x);
  const Vector rhs = apply_j(phi_eps * w);
  const Complex num = (phi_mu_eps * v1).dot(rhs);  // v1* Phi_mu* J Phi w
  const Complex den = (phi_mu_eps * v2).dot(rhs);
  if (std::abs(den) < 1e-14 * std::abs(num))
    throw ValidationError(
        "physical_beta: degenerate system (target already satisfies the "
        "condition for every beta)");
  const Complex beta = std::conj(-num / den);

  PhysicalBetaResult out;
  out.beta = beta;
  out.circle_radius = std::sqrt(-nu1 / nu2);
  out.off_circle = std::abs(std::abs(beta) - out.circle_radius) /
                   out.circle_radius;
  const Vector u = phi_mu_eps * (v1 + beta * v2);
  out.residual = std::abs(u.dot(rhs)) /
                 std::max(1e-300, u.norm() * rhs.norm());
  return out;
}

// ---- lying frames ----------------------------------------------------------------

FramePath lying_frame(const HamiltonianSystem& sys, double lambda,
                      EndSide side, const BoundarySpec& spec, double probe_x,
                      double base_c, double window_lo, double window_hi,
                      const IntegratorConfig& cfg) {
  const int n = sys.n;

  // Regular endpoint with boundary matrix: X(end) = J alpha(lambda)*.
  if (std::holds_alternative<RegularAlphaSpec>(spec)) {
    if (!sys.alpha || sys.alpha_side != side)
      throw FrameConstructionError("no boundary matrix at this endpoint");
    const Matrix al = (*sys.alpha)(lambda);
    if (numeric_rank(al) != n)
      throw FrameConstructionError("alpha(lambda) is rank-deficient");
    if ((al * apply_j(al.adjoint())).norm() > 1e-10 * al.squaredNorm())
      throw FrameConstructionError("alpha J alpha* != 0");
    const double end = sys.endpoint(side);
    FramePath path = evolve_frame(sys, lambda, apply_j(al.adjoint()), end,
                                  std::min(window_lo, end),
                                  std::max(window_hi, end), cfg);
    return path;
  }

  // Prescribed solution value at an offset near a (limit-circle) endpoint.
  if (std::holds_alternative<PhysicalVectorSpec>(spec)) {
    const auto& ps = std::get<PhysicalVectorSpec>(spec);
    const double end = sys.endpoint(side);
    if (!std::isfinite(end))
      throw FrameConstructionError(
          "physical-vector boundary data needs a finite endpoint");
    const double x0 = side == EndSide::Left ? end + ps.eps : end - ps.eps;
    Matrix f0(2 * n, 1);
    f0.col(0) = ps.target.normalized();
    if (n != 1)
      throw FrameConstructionError(
          "physical-vector boundary data is a one-column spec (n = 1)");
    return evolve_frame(sys, lambda, f0, x0, std::min(window_lo, x0),
                        std::max(window_hi, x0), cfg);
  }

  // Singular boundary condition lim U* J y = 0 from Niessen data, imposed at
  // the enforcement offset.
  if (std::holds_alternative<NiessenDataSpec>(spec)) {
    const auto& nd = std::get<NiessenDataSpec>(spec);
    const double end = sys.endpoint(side);
    const double x0 = std::isfinite(end)
                          ? (side == EndSide::Left ? end + nd.eps : end - nd.eps)
                          : probe_x;
    // U at x0 under the (mu0, lambda0) flow.
    IntegratorConfig pcfg = cfg;
    ProbePath mu_flow = integrate_probe(sys, nd.elements.mu0,
                                        nd.elements.lambda0, base_c, x0, pcfg);
    const Matrix u0 = mu_flow.phi(x0) * nd.elements.R;
    // Solutions y = Phi(.; 0, lambda) w with U(x0)* J Phi(x0) w = 0.
    ProbePath real_flow = integrate_probe(sys, 0.0, lambda, base_c, x0, pcfg);
    const Matrix cond = u0.adjoint() * apply_j(real_flow.phi(x0));
    // Kernel of the n x 2n condition matrix.
    Eigen::JacobiSVD<Matrix> svd(cond, Eigen::ComputeFullV);
    Matrix f0 = svd.matrixV().rightCols(n);
    Matrix value0 = real_flow.phi(x0) * f0;
    return evolve_frame(sys, lambda, orthonormalize_columns(value0), x0,
                        std::min(window_lo, x0), std::max(window_hi, x0), cfg);
  }

  // Limit-point (or generic singular) endpoint: real-lambda probe, finite
  // paths give the lying solutions; initialize at the probe point and evolve
  // inward (the stabilizing direction for solutions small at the endpoint,
  // which also means a tighter tolerance on the probe itself buys nothing).
  std::vector<double> ladder =
      default_probe_points(sys, side, std::abs(probe_x - sys.endpoint(side)),
                           std::abs(probe_x), 4);
  ladder.back() = probe_x;
  IntegratorConfig probe_cfg = cfg;
  probe_cfg.rel_tol = std::max(cfg.rel_tol, 1e-7);
  probe_cfg.abs_tol = std::max(cfg.abs_tol, 1e-9);
  NiessenProbe probe =
      eigen_probe(sys, 0.0, lambda, base_c, ladder, side, probe_cfg);

  // Under the spectral-gap hypothesis exactly n paths stay finite at mu = 0.
  // When the divergent magnitudes have run far beyond the finite ones the
  // magnitude gap itself is the robust detector (the finite eigenvalue
  // values sit below the eigensolver floor of a matrix that large); the
  // Cauchy classification covers the moderate-scale cases.
  const ProbePoint& deepest = probe.points.back();
  const int dim = 2 * n;
  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(deepest.values(a)) < std::abs(deepest.values(b));
  });
  const double small_mag = std::abs(deepest.values(order[n - 1]));
  const double large_mag = std::abs(deepest.values(order[n]));
  std::vector<int> chosen;
  if (large_mag > 1e3 * std::max(small_mag, 1e-12)) {
    chosen.assign(order.begin(), order.begin() + n);
  } else {
    EndpointClassification cls = classify_endpoint(probe);
    chosen = cls.finite_paths;
    if (static_cast<int>(chosen.size()) > n) {
      std::sort(chosen.begin(), chosen.end(), [&](int a, int b) {
        return std::abs(deepest.values(a)) < std::abs(deepest.values(b));
      });
      chosen.resize(n);
    }
  }
  if (static_cast<int>(chosen.size()) < n) {
    std::ostringstream os;
    os << "only " << chosen.size() << " finite-limit paths at mu = 0 (need "
       << n << "): essential-spectrum collision or tolerance failure";
    throw FrameConstructionError(os.str());
  }

  Matrix w(dim, n);
  for (int j = 0; j < n; ++j) w.col(j) = deepest.vectors.col(chosen[j]);

  const double xp = deepest.x;
  Matrix f0 = orthonormalize_columns(probe.prop->phi(xp) * w);
  return evolve_frame(sys, lambda, f0, xp, std::min(window_lo, xp),
                      std::max(window_hi, xp), cfg);
}

}  // namespace osc
