#include "osc/greens.hpp"

#include <cmath>

namespace osc {

Matrix choose_gamma(const Matrix& rb) {
  if (!is_lagrangian_frame(rb))
    throw ValidationError("choose_gamma: input frame is not Lagrangian");
  return rb.adjoint();
}

GreensAssembly make_greens_assembly(const HamiltonianSystem& sys,
                                    double lambda, double c, double b_prime,
                                    const Matrix& gamma, const Matrix& rb,
                                    const IntegratorConfig& cfg) {
  const int n = sys.n;
  if (numeric_rank(gamma) != n)
    throw ValidationError("gamma is rank-deficient");
  if ((gamma * apply_j(gamma.adjoint())).norm() > 1e-9 * gamma.squaredNorm())
    throw ValidationError("gamma J gamma* != 0");
  if (!is_lagrangian_frame(rb))
    throw ValidationError("right coordinate frame is not Lagrangian");

  GreensAssembly g;
  g.lambda = lambda;
  g.c = c;
  g.b_prime = b_prime;
  g.gamma = gamma;
  g.Rb = rb;
  g.E = Matrix(2 * n, 2 * n);
  g.E.leftCols(n) = apply_j(gamma.adjoint());
  g.E.rightCols(n) = rb;

  Eigen::JacobiSVD<Matrix> svd(g.E);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw ValidationError(
        "E(lambda) singular: zero is an eigenvalue of the truncated problem");
  g.E_condition = sv(0) / sv(sv.size() - 1);

  const Matrix e_inv = g.E.colPivHouseholderQr().solve(
      Matrix::Identity(2 * n, 2 * n));
  g.M = e_inv * apply_j(e_inv.adjoint());

  g.flow = std::make_shared<ProbePath>(
      integrate_probe(sys, 0.0, lambda, c, b_prime, cfg));
  g.B = [bf = sys.B, lambda](double x) { return bf(x, lambda); };
  g.Bl = [blf = sys.B_lambda, lambda](double x) { return blf(x, lambda); };
  return g;
}

Matrix greens_kernel(const GreensAssembly& g, double x, double xi) {
  const int n = static_cast<int>(g.Rb.cols());
  const Matrix phi_x = g.flow->phi(x);
  const Matrix phi_xi = g.flow->phi(xi);
  Matrix jg_pad = Matrix::Zero(2 * n, 2 * n);   // (J gamma*  0)
  jg_pad.leftCols(n) = apply_j(g.gamma.adjoint());
  Matrix rb_pad = Matrix::Zero(2 * n, 2 * n);   // (0  Rb)
  rb_pad.rightCols(n) = g.Rb;
  if (xi < x)
    return -phi_x * rb_pad * g.M * jg_pad.adjoint() * phi_xi.adjoint();
  return phi_x * jg_pad * g.M * rb_pad.adjoint() * phi_xi.adjoint();
}

namespace {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kNodes[7] = {-0.9491079123427585, -0.7415311855993945,
                              -0.4058451513773972, 0.0,
                              0.4058451513773972,  0.7415311855993945,
                              0.9491079123427585};
constexpr double kWeights[7] = {0.1294849661688697, 0.2797053914892767,
                                0.3818300505051189, 0.4179591836734694,
                                0.3818300505051189, 0.2797053914892767,
                                0.1294849661688697};

}  // namespace

InhomogeneousSolution solve_inhomogeneous(
    const GreensAssembly& g, const std::function<Vector(double)>& f,
    const std::vector<double>& xs, int panels) {
  InhomogeneousSolution out;
  out.xs = xs;

  // Composite 7-point Gauss over [c, b'], with the panel containing x split
  // at x so each kernel branch is integrated where it is smooth.
  auto y_eval = [&](double x) {
    const int n2 = static_cast<int>(g.Rb.rows());
    Vector acc = Vector::Zero(n2);
    const double h = (g.b_prime - g.c) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = g.c + p * h;
      const double hi = lo + h;
      std::vector<std::pair<double, double>> pieces;
      if (x > lo && x < hi)
        pieces = {{lo, x}, {x, hi}};
      else
        pieces = {{lo, hi}};
      for (auto [plo, phi] : pieces) {
        const double mid = 0.5 * (plo + phi), half = 0.5 * (phi - plo);
        if (half <= 0) continue;
        for (int q = 0; q < 7; ++q) {
          const double xi = mid + half * kNodes[q];
          acc += (half * kWeights[q]) *
                 (greens_kernel(g, x, xi) * (g.Bl(xi) * f(xi)));
        }
      }
    }
    return acc;
  };

  for (double x : xs) out.y.push_back(y_eval(x));

  // Residual in integrated form on consecutive grid intervals:
  // y(x2) - y(x1) = \int (-J)(B y + B_l f), with y at quadrature nodes taken
  // from the Green's representation itself.
  double ynorm = 0;
  for (const auto& y : out.y) ynorm = std::max(ynorm, y.norm());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i], hi = xs[i + 1];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    Vector integral = Vector::Zero(out.y[i].size());
    for (int q = 0; q < 7; ++q) {
      const double xi = mid + half * kNodes[q];
      const Vector yq = y_eval(xi);
      integral +=
          (half * kWeights[q]) *
          Vector(-apply_j(Vector(g.B(xi) * yq + g.Bl(xi) * f(xi))));
    }
    const Vector res = out.y[i + 1] - out.y[i] - integral;
    out.max_ode_residual =
        std::max(out.max_ode_residual,
                 res.norm() / ((hi - lo) * (1.0 + ynorm)));
  }
  if (!xs.empty()) {
    out.boundary_residual_left = (g.gamma * out.y.front()).norm() /
                                 (1.0 + out.y.front().norm());
    const Matrix ub = g.flow->phi(g.b_prime) * g.Rb;
    // Solved y(b') must lie in the span of the right frame: distance of the
    // normalized value to that span.
    const Matrix q = orthonormalize_columns(ub);
    const Vector yb = out.y.back();
    if (yb.norm() > 0) {
      const Vector proj = q * (q.adjoint() * yb);
      out.boundary_residual_right = (yb - proj).norm() / yb.norm();
    }
  }
  return out;
}

}  // namespace osc
