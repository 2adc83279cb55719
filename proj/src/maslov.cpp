#include "osc/maslov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>

namespace osc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct PhasePoint {
  double t;
  Eigen::VectorXd theta;  // unwrapped
  Matrix vecs;
};

void eig_unitary(const Matrix& w, Eigen::VectorXd& phases, Matrix& vecs) {
  const int n = static_cast<int>(w.rows());
  if (n == 1) {
    phases.resize(1);
    phases(0) = std::arg(w(0, 0));
    vecs = Matrix::Ones(1, 1);
    return;
  }
  Eigen::ComplexEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("unitary eigendecomposition failed");
  phases.resize(n);
  vecs = es.eigenvectors();
  for (int j = 0; j < n; ++j) {
    phases(j) = std::arg(es.eigenvalues()(j));
    vecs.col(j).normalize();
  }
}

double wrap_to(double raw, double ref, int prior = 0) {
  const double two_pi = 2.0 * kPi;
  double out = raw + std::round((ref - raw) / two_pi) * two_pi;
  if (prior != 0) {
    // Allow a small counter-rotation margin for numerical wobble.
    const double margin = 0.35;
    if (prior < 0 && out - ref > margin) out -= two_pi;
    if (prior > 0 && out - ref < -margin) out += two_pi;
  }
  return out;
}

PhasePoint first_point(double t, const Matrix& w) {
  PhasePoint p;
  p.t = t;
  eig_unitary(w, p.theta, p.vecs);
  return p;
}

PhasePoint advance(const PhasePoint& prev, double t, const Matrix& w,
                   double* step, double* overlap, int prior = 0) {
  PhasePoint p;
  p.t = t;
  Eigen::VectorXd raw;
  Matrix vecs;
  eig_unitary(w, raw, vecs);
  const int n = static_cast<int>(raw.size());

  std::vector<std::tuple<double, int, int>> scores;
  scores.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      scores.emplace_back(std::abs(prev.vecs.col(i).dot(vecs.col(j))), i, j);
  std::sort(scores.begin(), scores.end(), std::greater<>());
  std::vector<int> perm(n, -1), taken(n, 0);
  double min_ov = 1.0;
  int assigned = 0;
  for (const auto& [s, i, j] : scores) {
    if (perm[i] >= 0 || taken[j]) continue;
    perm[i] = j;
    taken[j] = 1;
    min_ov = std::min(min_ov, s);
    if (++assigned == n) break;
  }

  p.theta.resize(n);
  p.vecs.resize(vecs.rows(), n);
  double dmax = 0;
  for (int i = 0; i < n; ++i) {
    p.theta(i) = wrap_to(raw(perm[i]), prev.theta(i), prior);
    p.vecs.col(i) = vecs.col(perm[i]);
    dmax = std::max(dmax, std::abs(p.theta(i) - prev.theta(i)));
  }
  if (step) *step = dmax;
  if (overlap) *overlap = min_ov;
  return p;
}

double nearest_level(double theta) {
  return kPi + 2.0 * kPi * std::round((theta - kPi) / (2.0 * kPi));
}

double gap_to_minus_one(double theta) {
  return std::abs(theta - nearest_level(theta));
}

}  // namespace

Matrix relative_unitary(const Matrix& f1, const Matrix& f2) {
  const int n = static_cast<int>(f1.cols());
  const Complex i(0, 1);
  const Matrix x1 = f1.topRows(n), y1 = f1.bottomRows(n);
  const Matrix x2 = f2.topRows(n), y2 = f2.bottomRows(n);
  auto solve_right = [](const Matrix& num, const Matrix& den) {
    // num * den^{-1} without forming the inverse
    return den.adjoint()
        .colPivHouseholderQr()
        .solve(num.adjoint())
        .adjoint()
        .eval();
  };
  const Matrix a = solve_right(Matrix(x1 + i * y1), Matrix(x1 - i * y1));
  const Matrix b = solve_right(Matrix(x2 - i * y2), Matrix(x2 + i * y2));
  Matrix w = -a * b;
  const double unit_defect =
      (w * w.adjoint() - Matrix::Identity(n, n)).norm();
  if (unit_defect > 1e-6)
    throw std::runtime_error(
        "relative unitary far from unitary: frame conditioning failure");
  return w;
}

int intersection_dim(const Matrix& f1, const Matrix& f2, double angle_tol) {
  const Matrix w = relative_unitary(f1, f2);
  Eigen::VectorXd phases;
  Matrix vecs;
  eig_unitary(w, phases, vecs);
  int by_phase = 0;
  for (int j = 0; j < phases.size(); ++j)
    if (gap_to_minus_one(phases(j)) <= angle_tol) ++by_phase;

  const Matrix wron = orthonormalize_columns(f1).adjoint() *
                      apply_j(orthonormalize_columns(f2));
  const int n = static_cast<int>(f1.cols());
  Eigen::JacobiSVD<Matrix> svd(wron);
  int by_rank = 0;
  for (int j = 0; j < n; ++j)
    if (svd.singularValues()(j) <= std::max(angle_tol, 1e-9)) ++by_rank;

  if (by_phase != by_rank)
    throw std::runtime_error(
        "intersection_dim: unitary-phase and Wronskian-rank estimates "
        "disagree (tolerance conflict)");
  return by_phase;
}

namespace {

struct Engine {
  const FramePairPath& path;
  const MaslovOptions& opt;
  std::vector<PhasePoint> pts;
  double min_gap = kPi;

  Matrix w_at(double t) const {
    auto [f1, f2] = path.frames(t);
    return relative_unitary(f1, f2);
  }

  void note_gap(const PhasePoint& p) {
    for (int j = 0; j < p.theta.size(); ++j)
      min_gap = std::min(min_gap, gap_to_minus_one(p.theta(j)));
  }

  void build() {
    if (!opt.initial_ts.empty()) {
      pts.reserve(opt.initial_ts.size() + 16);
      pts.push_back(first_point(opt.initial_ts.front(),
                                w_at(opt.initial_ts.front())));
      note_gap(pts.back());
      for (std::size_t k = 1; k < opt.initial_ts.size(); ++k)
        extend_to(opt.initial_ts[k], 0);
      return;
    }
    const int m = std::max(2, opt.initial_samples);
    pts.reserve(m + 16);
    pts.push_back(first_point(path.t0, w_at(path.t0)));
    note_gap(pts.back());
    for (int k = 1; k < m; ++k) {
      const double t = path.t0 + (path.t1 - path.t0) * k / (m - 1);
      extend_to(t, 0);
    }
  }

  void extend_to(double t, int depth) {
    const PhasePoint& prev = pts.back();
    double step = 0, overlap = 1;
    PhasePoint next = advance(prev, t, w_at(t), &step, &overlap, opt.monotone);
    const bool can_split =
        std::abs(t - prev.t) >
        1e-13 * (std::abs(t) + std::abs(prev.t) + 1e-12);
    if ((step > opt.max_phase_step || overlap < 0.5) && can_split) {
      if (depth >= opt.max_refine_depth)
        throw UnresolvablePathError(
            "phase step unresolvable after maximal refinement");
      const double tm = 0.5 * (prev.t + t);
      extend_to(tm, depth + 1);
      extend_to(t, depth + 1);
      return;
    }
    pts.push_back(std::move(next));
    note_gap(pts.back());
  }

  // Bisect a transversal crossing of path j between pts[i] and pts[i+1].
  double locate(int j, std::size_t i, double level) const {
    double lo = pts[i].t, hi = pts[i + 1].t;
    PhasePoint left = pts[i];
    const double tol = opt.t_tol > 0
                           ? opt.t_tol
                           : std::abs(path.t1 - path.t0) * 1e-9;
    while (std::abs(hi - lo) > tol) {
      const double tm = 0.5 * (lo + hi);
      PhasePoint mid = advance(left, tm, w_at(tm), nullptr, nullptr,
                               opt.monotone);
      if ((mid.theta(j) - level) * (left.theta(j) - level) <= 0.0) {
        hi = tm;
      } else {
        lo = tm;
        left = std::move(mid);
      }
    }
    return 0.5 * (lo + hi);
  }
};

struct Event {
  double t;
  int dir;       // +1 / -1
  bool counted;
  CrossingBoundary boundary;
};

}  // namespace

MaslovPathResult maslov_index_path(const FramePairPath& path,
                                   const MaslovOptions& opt) {
  MaslovPathResult out;
  Engine eng{path, opt, {}, kPi};
  eng.build();
  const auto& pts = eng.pts;
  const int n = static_cast<int>(pts.front().theta.size());

  std::vector<Event> events;

  for (int j = 0; j < n; ++j) {
    auto theta = [&](std::size_t i) { return pts[i].theta(j); };
    auto at_level = [&](double th, double lv) {
      return std::abs(th - lv) <= opt.angle_snap;
    };

    // Episode state: a maximal run of at-level samples.
    bool in_episode = at_level(theta(0), nearest_level(theta(0)));
    double level = nearest_level(theta(0));
    bool from_start = in_episode;
    bool entered_from_below = false;
    double entry_t = path.t0;

    auto flush_entry = [&](bool runs_to_end) {
      if (from_start) return;  // no entry event for an episode starting at t0
      events.push_back({entry_t, +1, entered_from_below,
                        runs_to_end ? CrossingBoundary::Arrival
                                    : CrossingBoundary::Interior});
    };

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = theta(i), b = theta(i + 1);
      if (in_episode) {
        if (at_level(b, level)) continue;
        // episode ends between i and i+1
        flush_entry(false);
        events.push_back({pts[i + 1].t, -1, b < level,
                          from_start ? CrossingBoundary::Departure
                                     : CrossingBoundary::Interior});
        in_episode = false;
        continue;
      }
      const double lv = nearest_level(0.5 * (a + b));
      if (at_level(b, lv)) {
        in_episode = true;
        level = lv;
        from_start = false;
        entered_from_below = a < lv;
        entry_t = pts[i + 1].t;
        continue;
      }
      if ((a - lv) * (b - lv) < 0.0) {
        const double t_star = eng.locate(j, i, lv);
        events.push_back(
            {t_star, b > a ? +1 : -1, true, CrossingBoundary::Interior});
      }
    }
    if (in_episode) {
      if (from_start) {
        ++out.persistent_paths;  // at -1 over the whole interval
      } else {
        flush_entry(true);
      }
    }
  }

  std::sort(events.begin(), events.end(),
            [](const Event& l, const Event& r) { return l.t < r.t; });
  const double merge_tol =
      std::max(opt.t_tol, std::abs(path.t1 - path.t0) * 1e-9) * 4.0;
  for (std::size_t i = 0; i < events.size();) {
    Crossing c;
    c.t = events[i].t;
    c.direction = events[i].dir;
    c.boundary = events[i].boundary;
    c.counted = events[i].counted;
    c.multiplicity = 1;
    std::size_t k = i + 1;
    while (k < events.size() && events[k].dir == events[i].dir &&
           events[k].counted == events[i].counted &&
           events[k].boundary == events[i].boundary &&
           std::abs(events[k].t - events[i].t) <= merge_tol) {
      ++c.multiplicity;
      ++k;
    }
    if (c.counted) out.index += c.direction * c.multiplicity;
    out.crossings.push_back(c);
    i = k;
  }
  out.min_gap_to_minus_one = eng.min_gap;

  const std::size_t stride = std::max<std::size_t>(1, pts.size() / 64);
  for (std::size_t i = 0; i < pts.size(); i += stride) {
    UnitaryFlowSample s;
    s.t = pts[i].t;
    s.phases = pts[i].theta;
    out.samples.push_back(std::move(s));
  }
  return out;
}

int crossing_direction(const FramePairPath& path, double t_star, double dt,
                       int which) {
  const double tlo = std::max(path.t0, t_star - dt);
  const double thi = std::min(path.t1, t_star + dt);
  auto [f1m, f2m] = path.frames(tlo);
  auto [f1c, f2c] = path.frames(t_star);
  auto [f1p, f2p] = path.frames(thi);
  const double span = thi - tlo;

  struct Definiteness {
    bool nonneg, nonpos, pd, nd;
  };
  auto definite = [&](const Matrix& m) -> Definiteness {
    const auto eig = hermitian_eigen(Matrix(0.5 * (m + m.adjoint())), kInf);
    const double scale = std::max(1e-300, m.norm());
    return {eig.values.minCoeff() > -1e-9 * scale,
            eig.values.maxCoeff() < 1e-9 * scale,
            eig.values.minCoeff() > 1e-9 * scale,
            eig.values.maxCoeff() < -1e-9 * scale};
  };

  // A held frame has zero derivative: non-negative and non-positive, never
  // definite.
  Definiteness d1{true, true, false, false}, d2{true, true, false, false};
  if (which != 2)
    d1 = definite(Matrix(-f1c.adjoint() * apply_j((f1p - f1m) / span)));
  if (which != 1)
    d2 = definite(Matrix(f2c.adjoint() * apply_j((f2p - f2m) / span)));

  if (d1.nonneg && d2.nonneg && (d1.pd || d2.pd)) return +1;
  if (d1.nonpos && d2.nonpos && (d1.nd || d2.nd)) return -1;

  // Fallback: slope of the phase nearest -1 at t_star.
  PhasePoint a = first_point(tlo, relative_unitary(f1m, f2m));
  PhasePoint b = advance(a, thi, relative_unitary(f1p, f2p), nullptr, nullptr);
  PhasePoint c = advance(a, t_star, relative_unitary(f1c, f2c), nullptr, nullptr);
  int jbest = 0;
  double best = kInf;
  for (int j = 0; j < c.theta.size(); ++j) {
    const double gap = gap_to_minus_one(c.theta(j));
    if (gap < best) {
      best = gap;
      jbest = j;
    }
  }
  const double slope = b.theta(jbest) - a.theta(jbest);
  if (std::abs(slope) < 1e-12) return 0;
  return slope > 0 ? +1 : -1;
}

}  // namespace osc
