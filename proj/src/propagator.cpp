#include "osc/propagator.hpp"

#include <algorithm>
#include <cmath>

namespace osc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Error weights: b - b_hat.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (Hairer-Norsett-Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

Vector DenseStep::eval(double x) const {
  const double theta = (x - x0) / h;
  const double t1 = 1.0 - theta;
  // y(theta) = c0 + theta(c1 + t1(c2 + theta(c3 + t1 c4)))
  Vector acc = coeff[3] + t1 * coeff[4];
  acc = coeff[2] + theta * acc;
  acc = coeff[1] + t1 * acc;
  return coeff[0] + theta * acc;
}

double DensePath::x_begin() const { return steps_.front().x0; }
double DensePath::x_end() const {
  const auto& s = steps_.back();
  return s.x0 + s.h;
}

bool DensePath::covers(double x) const {
  if (empty()) return false;
  const double lo = std::min(x_begin(), x_end());
  const double hi = std::max(x_begin(), x_end());
  const double slack = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
  return x >= lo - slack && x <= hi + slack;
}

const DenseStep& DensePath::locate(double x) const {
  const bool fwd = steps_.front().h > 0;
  // Binary search over step start points in traversal order.
  std::size_t lo = 0, hi = steps_.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    const bool before = fwd ? (x < steps_[mid].x0) : (x > steps_[mid].x0);
    if (before)
      hi = mid;
    else
      lo = mid;
  }
  return steps_[lo];
}

Vector DensePath::eval(double x) const {
  if (!covers(x)) throw std::runtime_error("DensePath::eval: x outside range");
  return locate(x).eval(x);
}

DensePath integrate_dense(const RhsFn& rhs, Vector y, double x0, double x1,
                          const IntegratorConfig& cfg,
                          const PostStepFn& post_step, bool floor_toward_zero,
                          double* end_x) {
  DensePath out;
  if (end_x) *end_x = x0;
  if (x0 == x1) return out;
  const double dir = x1 > x0 ? 1.0 : -1.0;
  double x = x0;
  Vector k1 = rhs(x, y);

  // Initial step: modest fraction of the interval, limited by rhs scale.
  double h = dir * std::min({std::abs(x1 - x0) / 16.0, cfg.max_step,
                             std::max(1e-8, 0.01 * y.norm() /
                                                std::max(k1.norm(), 1e-30))});
  if (h == 0.0) h = dir * 1e-8;

  auto err_norm = [&](const Vector& err, const Vector& y0, const Vector& y1) {
    double acc = 0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sc =
          cfg.abs_tol +
          cfg.rel_tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
      const double q = std::abs(err(i)) / sc;
      acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
  };

  std::size_t nsteps = 0;
  while (dir * (x1 - x) > 0) {
    if (++nsteps > cfg.max_steps)
      throw IntegrationError("step limit exceeded", x);
    // Endgame snap: once the remaining distance is below the underflow
    // guard, the target is reached for all purposes of dense evaluation.
    if (std::abs(x1 - x) <= 4e-14 * (std::abs(x) + 1e-30)) {
      if (end_x) *end_x = x1;
      break;
    }
    if (dir * (x + h) > dir * x1) h = x1 - x;

    // Step-size floor approaching a coordinate singularity at x = 0.
    double h_floor = 0.0;
    if (floor_toward_zero) {
      const double dest = std::abs(x + h);
      h_floor = cfg.singular_floor * std::min(std::abs(x), dest);
    }
    const double tiny = 1e-14 * (std::abs(x) + 1e-30);
    if (std::abs(h) < tiny) throw IntegrationError("step underflow", x);

    const Vector k2 = rhs(x + c2 * h, y + h * (a21 * k1));
    const Vector k3 = rhs(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = rhs(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 =
        rhs(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector y6 =
        y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const Vector k6 = rhs(x + h, y6);
    const Vector ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = rhs(x + h, ynew);
    const Vector err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = err_norm(err, y, ynew);
    const bool at_floor = h_floor > 0 && std::abs(h) <= h_floor * 1.0000001;
    if (en <= 1.0 || at_floor) {
      // Accept; store dense coefficients.
      DenseStep step;
      step.x0 = x;
      step.h = h;
      const Vector dy = ynew - y;
      const Vector bspl = h * k1 - dy;
      step.coeff.resize(5);
      step.coeff[0] = y;
      step.coeff[1] = dy;
      step.coeff[2] = bspl;
      step.coeff[3] = dy - h * k7 - bspl;
      step.coeff[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 +
                           d7 * k7);
      out.push(std::move(step));

      x += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (end_x) *end_x = x;
      if (post_step) {
        const StepAction act = post_step(x, y);
        if (act == StepAction::Stop) return out;
        if (act == StepAction::StateChanged) k1 = rhs(x, y);
      }
      const double grow = en > 1e-30 ? 0.9 * std::pow(en, -0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
    if (std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
    if (h_floor > 0 && std::abs(h) < h_floor) h = dir * h_floor;
  }
  return out;
}

// ---- probe path ---------------------------------------------------------------

namespace {

Vector mat_to_vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}
Matrix vec_to_mat(const Vector& v, int rows, int cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace

Matrix ProbePath::phi(double x) const {
  const Vector s = path_.eval(x);
  return vec_to_mat(s.head(dim_ * dim_), dim_, dim_);
}

Matrix ProbePath::weight(double x) const {
  const Vector s = path_.eval(x);
  Matrix w = vec_to_mat(s.tail(dim_ * dim_), dim_, dim_);
  return 0.5 * (w + w.adjoint());  // symmetrize accumulated roundoff
}

ProbePath integrate_probe(const HamiltonianSystem& sys, Complex mu,
                          double lambda, double c, double to,
                          const IntegratorConfig& cfg) {
  const int d = sys.dim();
  ProbePath out(d);
  out.base_ = c;
  out.reach_ = to;

  auto rhs = [&sys, mu, lambda, d](double x, const Vector& s) -> Vector {
    const Matrix phi = vec_to_mat(s.head(d * d), d, d);
    Matrix coef = sys.B(x, lambda);
    const Matrix bl = sys.B_lambda(x, lambda);
    if (mu != 0.0) coef += mu * bl;
    // Phi' = -J (B + mu B_l) Phi ;  W' = Phi* B_l Phi
    const Matrix dphi = -apply_j(coef * phi);
    const Matrix dw = phi.adjoint() * (bl * phi);
    Vector ds(s.size());
    ds.head(d * d) = mat_to_vec(dphi);
    ds.tail(d * d) = mat_to_vec(dw);
    return ds;
  };

  Vector s0(2 * d * d);
  s0.head(d * d) = mat_to_vec(Matrix::Identity(d, d));
  s0.tail(d * d).setZero();

  const bool toward_zero = std::abs(to) < std::abs(c);
  out.path_ = integrate_dense(rhs, s0, c, to, cfg, {}, toward_zero);
  return out;
}

FundamentalMatrixPath fundamental_matrix(const HamiltonianSystem& sys,
                                         Complex mu, double lambda, double c,
                                         const std::vector<double>& targets,
                                         const IntegratorConfig& cfg) {
  FundamentalMatrixPath out;
  out.base_point = c;
  out.mu = mu;
  out.lambda = lambda;
  if (targets.empty()) return out;

  const Matrix j = symplectic_j(sys.n);
  auto record = [&](const ProbePath& p, double x) {
    Matrix phi = p.phi(x);
    const double defect = (phi.adjoint() * j * phi - j).norm();
    out.sympl_defect_max = std::max(out.sympl_defect_max, defect);
    out.samples.push_back({x, std::move(phi)});
  };

  std::vector<double> below, above;
  for (double t : targets) (t < c ? below : above).push_back(t);
  std::sort(below.begin(), below.end(), std::greater<>());
  std::sort(above.begin(), above.end());

  if (!below.empty()) {
    ProbePath p = integrate_probe(sys, mu, lambda, c, below.back(), cfg);
    for (double t : below) record(p, t);
  }
  if (!above.empty()) {
    ProbePath p = integrate_probe(sys, mu, lambda, c, above.back(), cfg);
    for (double t : above) record(p, t);
  }
  std::sort(out.samples.begin(), out.samples.end(),
            [](const auto& l, const auto& r) { return l.x < r.x; });
  if (out.sympl_defect_max > cfg.sympl_tol)
    throw IntegrationError("symplectic defect exceeds tolerance; tighten rel_tol",
                           c);
  return out;
}

// ---- frame paths --------------------------------------------------------------

Matrix FramePath::eval(double x) const {
  for (std::size_t i = segments_.size(); i-- > 0;) {
    if (segments_[i].covers(x)) {
      const Vector s = segments_[i].eval(x);
      return vec_to_mat(s, dim_, ncols_);
    }
  }
  throw std::runtime_error("FramePath::eval: x outside range");
}

double FramePath::x_begin() const {
  double lo = kInf;
  for (const auto& s : segments_) lo = std::min(lo, std::min(s.x_begin(), s.x_end()));
  return lo;
}
double FramePath::x_end() const {
  double hi = -kInf;
  for (const auto& s : segments_) hi = std::max(hi, std::max(s.x_begin(), s.x_end()));
  return hi;
}
bool FramePath::covers(double x) const {
  for (const auto& s : segments_)
    if (s.covers(x)) return true;
  return false;
}

namespace {

// Integrate a frame sweep from (x0, f0) to x1, cutting a new dense segment at
// every renormalization.
void frame_sweep(const HamiltonianSystem& sys, double lambda, Matrix f0,
                 double x0, double x1, const IntegratorConfig& cfg,
                 FramePath& out) {
  if (x0 == x1) return;
  const int d = sys.dim();
  const int nc = static_cast<int>(f0.cols());

  auto rhs = [&sys, lambda, d, nc](double x, const Vector& s) -> Vector {
    const Matrix f = vec_to_mat(s, d, nc);
    const Matrix df = -apply_j(sys.B(x, lambda) * f);
    return mat_to_vec(df);
  };

  auto needs_renorm = [&](const Vector& state) {
    const Matrix cur = vec_to_mat(state, d, nc);
    for (int k = 0; k < nc; ++k) {
      const double cn = cur.col(k).norm();
      if (cn < cfg.norm_lo || cn > cfg.norm_hi) return true;
    }
    return false;
  };

  const bool toward_zero = std::abs(x1) < std::abs(x0);
  double x = x0;
  Matrix f = std::move(f0);
  while (x != x1) {
    double reached = x;
    DensePath seg = integrate_dense(
        rhs, mat_to_vec(f), x, x1, cfg,
        [&](double, Vector& state) {
          return needs_renorm(state) ? StepAction::Stop : StepAction::Continue;
        },
        toward_zero, &reached);
    if (!seg.empty()) {
      out.seg_starts_.push_back(x);
      out.segments_.push_back(std::move(seg));
    }
    if (reached == x)
      throw IntegrationError("frame sweep made no progress", x);
    if (reached == x1) break;
    f = orthonormalize_columns(
        vec_to_mat(out.segments_.back().eval(reached), d, nc));
    x = reached;
  }
}

}  // namespace

FramePath evolve_frame(const HamiltonianSystem& sys, double lambda, Matrix f0,
                       double x0, double lo, double hi,
                       const IntegratorConfig& cfg) {
  FramePath out(sys.dim(), static_cast<int>(f0.cols()));
  out.lambda = lambda;
  if (x0 > lo) frame_sweep(sys, lambda, f0, x0, lo, cfg, out);
  if (x0 < hi) frame_sweep(sys, lambda, f0, x0, hi, cfg, out);
  return out;
}

std::vector<Matrix> frame_at(const FramePath& path,
                             const std::vector<double>& xs) {
  std::vector<Matrix> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(path.eval(x));
  return out;
}

}  // namespace osc
