#include "osc/counter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace osc {

namespace {

// Phase-resolution heuristic: initial samples fine enough that no step can
// alias a full 2 pi loop, with a floor tied to the requested step size.
int samples_for(double span, double step) {
  const double by_step = span / std::max(step, 1e-300) / 8.0;
  return static_cast<int>(std::clamp(by_step, 129.0, 4097.0));
}

}  // namespace

FramePairFactory::FramePairFactory(const CountRequest& req) : req_(req) {}

const FramePath& FramePairFactory::get(EndSide side, double lambda) const {
  auto& cache = side == EndSide::Left ? left_cache_ : right_cache_;
  for (auto& [l, f] : cache)
    if (l == lambda) return f;
  const auto& spec = side == EndSide::Left ? req_.left_spec : req_.right_spec;
  const double probe =
      side == EndSide::Left ? req_.probe_left : req_.probe_right;
  FramePath path =
      lying_frame(*req_.sys, lambda, side, spec, probe, req_.base_c,
                  req_.window_lo, req_.window_hi, req_.integ);
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.emplace_back(lambda, std::move(path));
  return cache.back().second;
}

const FramePath& FramePairFactory::left(double lambda) const {
  return get(EndSide::Left, lambda);
}
const FramePath& FramePairFactory::right(double lambda) const {
  return get(EndSide::Right, lambda);
}

namespace {

// x-grid for a window: uniform in x with log-spaced filler near a singular
// bottom edge (the frame directions rotate on a log scale near a regular
// singular point, which uniform sampling aliases).
std::vector<double> x_grid_for(double lo, double hi, double x_step,
                               bool log_bottom) {
  std::vector<double> ts;
  const int m = samples_for(hi - lo, x_step);
  if (log_bottom && lo > 0 && lo < 0.02 * (hi - lo)) {
    const double top = 0.02 * (hi - lo);
    for (double x = lo; x < top; x *= 1.8) ts.push_back(x);
  }
  for (int k = 0; k < m; ++k)
    ts.push_back(lo + (hi - lo) * static_cast<double>(k) / (m - 1));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.front() = lo;
  ts.back() = hi;
  return ts;
}

// x-path of the pair (left(l_left), right(l_right)) over [lo, hi].
MaslovPathResult x_path_index(const FramePairFactory& fac, double l_left,
                              double l_right, double lo, double hi,
                              const MaslovOptions& base_opt, double x_step,
                              bool log_bottom) {
  const FramePath& fl = fac.left(l_left);
  const FramePath& fr = fac.right(l_right);
  FramePairPath path;
  path.t0 = lo;
  path.t1 = hi;
  path.frames = [&fl, &fr](double x) {
    return std::make_pair(fl.eval(x), fr.eval(x));
  };
  MaslovOptions opt = base_opt;
  opt.initial_ts = x_grid_for(lo, hi, x_step, log_bottom);
  if (opt.t_tol <= 0) opt.t_tol = x_step / 10.0;
  return maslov_index_path(path, opt);
}

// lambda-path of the pair at fixed x = c.  `vary` selects which side moves.
enum class Vary { Left, Right, Both };

// Uniform lambda grid plus geometric clusters around each seed: the phase of
// a pair whose left frame varies swings through a full turn inside an
// exponentially narrow lambda window around each (truncated) eigenvalue, so
// uniform sampling alone cannot see it.
std::vector<double> lambda_grid_for(double l1, double l2, double step,
                                    const std::vector<double>& seeds) {
  std::vector<double> ts;
  const int m = samples_for(l2 - l1, step);
  for (int k = 0; k < m; ++k)
    ts.push_back(l1 + (l2 - l1) * static_cast<double>(k) / (m - 1));
  const double span = l2 - l1;
  for (double s : seeds) {
    for (double w = 0.1 * span; w > 1e-12 * span; w *= 0.45) {
      for (double t : {s - w, s + w})
        if (t > l1 && t < l2) ts.push_back(t);
    }
    if (s > l1 && s < l2) ts.push_back(s);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.front() = l1;
  ts.back() = l2;
  return ts;
}

MaslovPathResult lambda_path_index(const FramePairFactory& fac, double c,
                                   double l1, double l2, Vary vary,
                                   const MaslovOptions& base_opt,
                                   double lambda_step,
                                   const std::vector<double>& seeds = {}) {
  FramePairPath path;
  path.t0 = l1;
  path.t1 = l2;
  path.frames = [&fac, c, l1, l2, vary](double l) {
    const double ll = vary == Vary::Right ? l1 : l;
    const double lr = vary == Vary::Left ? l2 : l;
    return std::make_pair(fac.left(ll).eval(c), fac.right(lr).eval(c));
  };
  MaslovOptions opt = base_opt;
  opt.initial_ts = lambda_grid_for(l1, l2, lambda_step, seeds);
  if (opt.t_tol <= 0) opt.t_tol = lambda_step / 10.0;
  opt.monotone = -1;  // lambda crossings rotate clockwise
  return maslov_index_path(path, opt);
}

// Correction term for a lambda-dependent boundary matrix at a regular
// endpoint: the Maslov index of (span J alpha(l)*, partner frame at that
// endpoint) as l runs over [l1, l2].
MaslovPathResult alpha_shelf_index(const FramePairFactory& fac,
                                   const CountRequest& req) {
  const HamiltonianSystem& sys = *req.sys;
  const bool at_left = sys.alpha_side == EndSide::Left;
  const double endpoint = at_left ? req.window_lo : req.window_hi;
  const Matrix partner = at_left
                             ? fac.right(req.lambda2).eval(endpoint)
                             : fac.left(req.lambda1).eval(endpoint);
  FramePairPath path;
  path.t0 = req.lambda1;
  path.t1 = req.lambda2;
  path.frames = [&sys, partner, at_left](double l) {
    const Matrix al = (*sys.alpha)(l);
    Matrix f = apply_j(al.adjoint());
    return at_left ? std::make_pair(f, partner)
                   : std::make_pair(partner, f);
  };
  MaslovOptions opt = req.maslov;
  opt.initial_samples = samples_for(req.lambda2 - req.lambda1, req.lambda_step);
  if (opt.t_tol <= 0) opt.t_tol = req.lambda_step / 10.0;
  opt.monotone = -1;
  return maslov_index_path(path, opt);
}

bool alpha_depends_on_lambda(const HamiltonianSystem& sys) {
  if (!sys.alpha) return false;
  const double l0 = sys.lambda_domain[0], l1 = sys.lambda_domain[1];
  return ((*sys.alpha)(l0) - (*sys.alpha)(l1)).norm() >
         1e-12 * (*sys.alpha)(l0).norm();
}

}  // namespace

CountResult count_eigenvalues(const CountRequest& req) {
  CountResult out;

  // When the right endpoint is singular, compute the crossing set over an
  // extended window; stabilization means no counted crossings appear beyond
  // the requested window (the x-crossings of the renormalized pair are all
  // positive, so the index over a sub-window is the count inside it).
  CountRequest ext = req;
  const bool right_singular = req.sys->b_kind == EndpointKind::Singular;
  if (right_singular) {
    double hi_ext = 2.0 * req.window_hi;
    if (std::isfinite(req.probe_right))
      hi_ext = std::min(hi_ext, req.window_lo +
                                    0.9 * (req.probe_right - req.window_lo));
    ext.window_hi = std::max(req.window_hi, hi_ext);
  }
  FramePairFactory fac(ext);

  const bool log_bottom = req.sys->a_kind == EndpointKind::Singular &&
                          std::isfinite(req.sys->a);
  MaslovPathResult full = x_path_index(fac, req.lambda1, req.lambda2,
                                       ext.window_lo, ext.window_hi,
                                       req.maslov, req.x_step, log_bottom);
  out.crossings.clear();
  int outer = 0;
  for (const auto& c : full.crossings) {
    if (c.t <= req.window_hi)
      out.crossings.push_back(c);
    else if (c.counted)
      ++outer;
  }
  for (const auto& c : out.crossings)
    if (c.counted) out.principal_index += c.direction * c.multiplicity;

  // Window stability: nothing beyond the requested window on the singular
  // right side, and on a singular left side the lowest crossing stands clear
  // of the truncation offset (the non-intersection margin below certifies
  // the endpoint zone itself).
  {
    bool stable = outer == 0;
    if (req.sys->a_kind == EndpointKind::Singular &&
        std::isfinite(req.sys->a)) {
      for (const auto& c : out.crossings)
        if (c.counted &&
            c.t - req.sys->a < 10.0 * (req.window_lo - req.sys->a))
          stable = false;
    }
    out.window_stable = stable;
    if (!stable)
      out.notes.push_back(
          "crossings near the window edge; grow the truncation window");
  }

  // Bottom-shelf correction for a lambda-dependent boundary matrix.
  if (alpha_depends_on_lambda(*req.sys)) {
    MaslovPathResult corr = alpha_shelf_index(fac, req);
    out.bottom_correction = corr.index;
  }
  out.count = out.principal_index - out.bottom_correction;

  // lambda2 eigenvalue detection: persistent right-shelf intersection.
  {
    const double mid = req.window_lo + 0.37 * (req.window_hi - req.window_lo);
    try {
      const int d = intersection_dim(fac.left(req.lambda2).eval(mid),
                                     fac.right(req.lambda2).eval(mid), 1e-6);
      if (d > 0) {
        out.lambda2_is_eigenvalue = true;
        out.notes.push_back(
            "lambda2 appears to be an eigenvalue; the half-open count "
            "[lambda1, lambda2) excludes it");
      }
    } catch (const std::exception&) {
      out.notes.push_back("lambda2 eigenvalue test inconclusive");
    }
  }

  // Equality status via the endpoint non-intersection conditions.
  double margin = kInf;
  bool holds = true;
  if (req.sys->a_kind == EndpointKind::Singular) {
    auto chk = endpoint_nonintersection_check(req, EndSide::Left,
                                              req.window_lo);
    margin = std::min(margin, chk.margin);
    holds = holds && chk.holds;
  }
  if (req.sys->b_kind == EndpointKind::Singular) {
    auto chk = endpoint_nonintersection_check(req, EndSide::Right,
                                              req.window_hi);
    margin = std::min(margin, chk.margin);
    holds = holds && chk.holds;
  }
  out.nonintersection_margin = std::isfinite(margin) ? margin : 0.0;
  out.equality = holds ? EqualityStatus::Equality
                       : EqualityStatus::InequalityOnly;
  return out;
}

int count_via_nullity_sum(const CountRequest& req) {
  FramePairFactory fac(req);
  const bool log_bottom = req.sys->a_kind == EndpointKind::Singular &&
                          std::isfinite(req.sys->a);
  MaslovPathResult full = x_path_index(fac, req.lambda1, req.lambda2,
                                       req.window_lo, req.window_hi,
                                       req.maslov, req.x_step, log_bottom);
  const FramePath& fl = fac.left(req.lambda1);
  const FramePath& fr = fac.right(req.lambda2);
  int total = 0;
  for (const auto& c : full.crossings) {
    if (!c.counted) continue;
    // Nullity at the located crossing, with a tolerance wide enough for the
    // location error.
    const Matrix f1 = fl.eval(c.t);
    const Matrix f2 = fr.eval(c.t);
    const Matrix wron = orthonormalize_columns(f1).adjoint() *
                        apply_j(orthonormalize_columns(f2));
    Eigen::JacobiSVD<Matrix> svd(wron);
    int nullity = 0;
    for (int j = 0; j < svd.singularValues().size(); ++j)
      if (svd.singularValues()(j) < 1e-4) ++nullity;
    total += std::max(nullity, c.multiplicity);
  }
  return total;
}

std::vector<double> lambda_event_seeds(const CountRequest& req) {
  if (!req.lambda_seeds.empty()) return req.lambda_seeds;
  SpectralCurveSet set =
      trace_spectral_curves(req, 1e-9 * (req.lambda2 - req.lambda1));
  return set.intercepts;
}

// Edge events of the box-pair curves: lambdas where the counted-crossing
// number of the pair (left(lambda), right(lambda2)) over the box window
// changes, located by integer bisection of the column count.  This is exact
// at any swing width, unlike pointwise phase sampling, which cannot see a
// crossing whose lambda-width is below double resolution (the widths shrink
// like exp(-2 kappa (c2 - x))).  Events are classified by where the
// appearing/disappearing crossing sits: near the bottom edge or (since the
// curves are monotone) at the top.
struct EdgeEvent {
  double lambda;
  int mult;        // |count change|
  bool drop;       // count decreased as lambda increased
  bool at_bottom;  // event at the bottom edge (else top)
};

std::vector<EdgeEvent> box_pair_edge_events(const FramePairFactory& fac,
                                            const CountRequest& boxed,
                                            bool log_bottom) {
  auto column = [&](double l) {
    MaslovPathResult r =
        x_path_index(fac, l, boxed.lambda2, boxed.window_lo, boxed.window_hi,
                     boxed.maslov, boxed.x_step, log_bottom);
    std::vector<double> xs;
    for (const auto& c : r.crossings)
      if (c.counted)
        for (int k = 0; k < c.multiplicity; ++k) xs.push_back(c.t);
    return xs;
  };
  const double l1 = boxed.lambda1, l2 = boxed.lambda2;
  const double span = l2 - l1;
  const int cols = 97;
  std::vector<EdgeEvent> events;
  double prev_l = l1;
  std::vector<double> prev_xs = column(l1);
  for (int k = 1; k < cols; ++k) {
    const double l = l1 + span * k / (cols - 1);
    std::vector<double> xs = column(l);
    if (xs.size() != prev_xs.size()) {
      double lo = prev_l, hi = l;
      std::vector<double> xs_lo = prev_xs, xs_hi = xs;
      while (hi - lo > 1e-13 * span) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> xm = column(mid);
        if (xm.size() != xs_lo.size()) {
          hi = mid;
          xs_hi = std::move(xm);
        } else {
          lo = mid;
          xs_lo = std::move(xm);
        }
      }
      EdgeEvent ev;
      ev.lambda = 0.5 * (lo + hi);
      ev.mult = static_cast<int>(
          std::abs<long>(static_cast<long>(xs_hi.size()) -
                         static_cast<long>(xs_lo.size())));
      ev.drop = xs_hi.size() < xs_lo.size();
      // The changed crossing: unmatched position on the larger side.
      const auto& big = ev.drop ? xs_lo : xs_hi;
      const auto& small = ev.drop ? xs_hi : xs_lo;
      double changed = big.empty() ? boxed.window_hi : big.back();
      std::vector<bool> used(small.size(), false);
      for (double xb : big) {
        int best = -1;
        double bd = kInf;
        for (std::size_t i = 0; i < small.size(); ++i) {
          if (used[i]) continue;
          if (std::abs(small[i] - xb) < bd) {
            bd = std::abs(small[i] - xb);
            best = static_cast<int>(i);
          }
        }
        const double win =
            0.2 * (boxed.window_hi - boxed.window_lo) + 10 * boxed.x_step;
        if (best >= 0 && bd < win)
          used[best] = true;
        else
          changed = xb;
      }
      ev.at_bottom = changed - boxed.window_lo <
                     0.1 * (boxed.window_hi - boxed.window_lo);
      events.push_back(ev);
    }
    prev_l = l;
    prev_xs = std::move(xs);
  }
  return events;
}

// Insert synthetic clockwise crossings for edge events the phase engine could
// not resolve (sub-resolution swing widths); directions follow the proven
// monotonicity of lambda-crossings.
void reconcile_shelf(MaslovPathResult& shelf, const std::vector<EdgeEvent>& evs,
                     bool bottom_shelf, double match_tol) {
  for (const auto& ev : evs) {
    if (ev.at_bottom != bottom_shelf) continue;
    int matched = 0;
    for (const auto& c : shelf.crossings)
      if (c.counted && std::abs(c.t - ev.lambda) <= match_tol)
        matched += c.multiplicity;
    if (matched >= ev.mult) continue;
    Crossing c;
    c.t = ev.lambda;
    c.multiplicity = ev.mult - matched;
    c.direction = -1;
    c.boundary = CrossingBoundary::Interior;
    c.counted = true;
    shelf.crossings.push_back(c);
    shelf.index -= c.multiplicity;
  }
  std::sort(shelf.crossings.begin(), shelf.crossings.end(),
            [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
}

MaslovBoxResult maslov_box(const CountRequest& req) {
  MaslovBoxResult box;
  const std::vector<double> seeds = lambda_event_seeds(req);
  box.seeds_used = seeds;
  box.window_lo = req.window_lo;
  box.window_hi = req.window_hi;

  FramePairFactory fac(req);
  const bool log_bottom = req.sys->a_kind == EndpointKind::Singular &&
                          std::isfinite(req.sys->a);

  const std::vector<EdgeEvent> events =
      box_pair_edge_events(fac, req, log_bottom);
  std::vector<double> shelf_seeds = seeds;
  for (const auto& ev : events) shelf_seeds.push_back(ev.lambda);
  const double match_tol =
      std::max(4.0 * req.lambda_step, 1e-6 * (req.lambda2 - req.lambda1));

  box.bottom.name = "bottom";
  box.bottom.oriented_sign = +1;
  box.bottom.path = lambda_path_index(fac, req.window_lo, req.lambda1,
                                      req.lambda2, Vary::Left, req.maslov,
                                      req.lambda_step, shelf_seeds);
  reconcile_shelf(box.bottom.path, events, true, match_tol);

  box.right.name = "right";
  box.right.oriented_sign = +1;
  box.right.path = x_path_index(fac, req.lambda2, req.lambda2, req.window_lo,
                                req.window_hi, req.maslov, req.x_step,
                                log_bottom);

  box.top.name = "top";
  box.top.oriented_sign = -1;  // traversed with lambda decreasing
  box.top.path = lambda_path_index(fac, req.window_hi, req.lambda1,
                                   req.lambda2, Vary::Left, req.maslov,
                                   req.lambda_step, shelf_seeds);
  reconcile_shelf(box.top.path, events, false, match_tol);

  box.left.name = "left";
  box.left.oriented_sign = -1;  // traversed with x decreasing
  box.left.path = x_path_index(fac, req.lambda1, req.lambda2, req.window_lo,
                               req.window_hi, req.maslov, req.x_step,
                               log_bottom);

  box.closure_sum = box.bottom.oriented_index() + box.right.oriented_index() +
                    box.top.oriented_index() + box.left.oriented_index();
  return box;
}

namespace {

// Counted crossing positions of the curve pair (left(lambda1), right(l)).
std::vector<SpectralCurvePoint> curve_column(const FramePairFactory& fac,
                                             const CountRequest& req,
                                             double l) {
  const bool log_bottom = req.sys->a_kind == EndpointKind::Singular &&
                          std::isfinite(req.sys->a);
  MaslovPathResult res = x_path_index(fac, req.lambda1, l, req.window_lo,
                                      req.window_hi, req.maslov, req.x_step,
                                      log_bottom);
  std::vector<SpectralCurvePoint> pts;
  for (const auto& c : res.crossings)
    if (c.counted) pts.push_back({l, c.t, c.multiplicity});
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.x < b.x; });
  return pts;
}

}  // namespace

SpectralCurveSet trace_spectral_curves(const CountRequest& req,
                                       double intercept_tol) {
  FramePairFactory fac(req);
  SpectralCurveSet out;

  std::vector<double> grid;
  for (double l = req.lambda1;; l += req.lambda_step) {
    if (l >= req.lambda2) {
      grid.push_back(req.lambda2);
      break;
    }
    grid.push_back(l);
  }

  std::vector<std::vector<SpectralCurvePoint>> columns;
  columns.reserve(grid.size());
  for (double l : grid) columns.push_back(curve_column(fac, req, l));

  // Assemble curves by nearest-neighbor continuation, scanning lambda
  // downward from lambda2 (curves are born at the lambda2 edge and die at
  // their bottom-shelf intercepts).
  struct Tracker {
    SpectralCurve curve;
    double last_x;
    int missing = 0;
    bool open = true;
  };
  std::vector<Tracker> trackers;
  int next_id = 0;
  for (std::size_t ci = columns.size(); ci-- > 0;) {
    const auto& col = columns[ci];
    std::vector<bool> used(col.size(), false);
    for (auto& tr : trackers) {
      if (!tr.open) continue;
      int best = -1;
      double best_d = kInf;
      for (std::size_t k = 0; k < col.size(); ++k) {
        if (used[k]) continue;
        const double d = std::abs(col[k].x - tr.last_x);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      // Generous association window: curves move fastest near touchdown.
      const double window =
          std::max(10.0 * req.x_step,
                   0.35 * std::abs(tr.last_x - req.window_lo) +
                       1e3 * req.x_step);
      if (best >= 0 && best_d < window) {
        used[best] = true;
        tr.curve.points.push_back(col[best]);
        tr.last_x = col[best].x;
        tr.missing = 0;
      } else if (++tr.missing > 3) {
        tr.open = false;  // died (or fragmented)
      }
    }
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (used[k]) continue;
      Tracker tr;
      tr.curve.id = next_id++;
      tr.curve.points.push_back(col[k]);
      tr.last_x = col[k].x;
      if (ci + 1 < columns.size() && !columns[ci + 1].empty())
        tr.curve.fragmented = true;  // born away from the lambda2 edge
      trackers.push_back(std::move(tr));
    }
  }

  // Bottom-shelf intercepts: the window count N(l) = # crossings of the
  // curve pair drops by one each time a curve exits through the bottom.
  auto window_count = [&](double l) {
    int cnt = 0;
    for (const auto& p : curve_column(fac, req, l)) cnt += p.multiplicity;
    return cnt;
  };
  std::vector<int> counts(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    counts[i] = static_cast<int>(columns[i].size());

  std::vector<double> intercepts;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    int drop = counts[i + 1] - counts[i];
    double lo = grid[i], hi = grid[i + 1];
    int clo = counts[i];
    while (drop > 0) {
      // Bisect the lowest intercept inside (lo, hi].
      double a = lo, b = hi;
      while (b - a > intercept_tol) {
        const double m = 0.5 * (a + b);
        if (window_count(m) > clo)
          b = m;
        else
          a = m;
      }
      intercepts.push_back(0.5 * (a + b));
      lo = b;
      ++clo;
      --drop;
    }
  }
  std::sort(intercepts.begin(), intercepts.end());
  out.intercepts = intercepts;

  // Attach intercepts to the curves that touch down nearest to them.
  for (auto& tr : trackers) {
    std::reverse(tr.curve.points.begin(), tr.curve.points.end());
    out.curves.push_back(std::move(tr.curve));
  }
  std::sort(out.curves.begin(), out.curves.end(),
            [](const SpectralCurve& a, const SpectralCurve& b) {
              return a.points.front().lambda < b.points.front().lambda;
            });
  // Lowest-touching curve pairs with the lowest intercept, in order.
  std::size_t k = 0;
  for (auto& c : out.curves) {
    if (k < out.intercepts.size() &&
        c.points.front().lambda >= out.intercepts[k] - 10 * req.lambda_step)
      c.intercept = out.intercepts[k++];
  }
  for (int id = 0; auto& c : out.curves) c.id = id++;
  return out;
}

NonintersectionCheck endpoint_nonintersection_check(const CountRequest& req,
                                                    EndSide side, double c,
                                                    int lambda_points) {
  FramePairFactory fac(req);
  NonintersectionCheck out;
  out.margin = kInf;
  for (int k = 0; k < lambda_points; ++k) {
    // Condition scans lambda over [lambda1, lambda2); sample up to just
    // below lambda2.
    const double l = req.lambda1 +
                     (req.lambda2 - req.lambda1) *
                         (static_cast<double>(k) / lambda_points);
    // Near the left endpoint the left frame varies; near the right endpoint
    // the right frame varies.
    const Matrix f1 = side == EndSide::Left ? fac.left(l).eval(c)
                                            : fac.left(req.lambda1).eval(c);
    const Matrix f2 = side == EndSide::Left ? fac.right(req.lambda2).eval(c)
                                            : fac.right(l).eval(c);
    const Matrix wron = orthonormalize_columns(f1).adjoint() *
                        apply_j(orthonormalize_columns(f2));
    Eigen::JacobiSVD<Matrix> svd(wron);
    const double smin =
        svd.singularValues()(svd.singularValues().size() - 1);
    if (smin < out.margin) {
      out.margin = smin;
      out.worst_lambda = l;
    }
  }
  out.holds = out.margin > 1e-6;
  return out;
}

TriangleCheck triangle_decomposition_check(const CountRequest& req, double c) {
  FramePairFactory fac(req);
  const std::vector<double> seeds = lambda_event_seeds(req);
  TriangleCheck out;
  out.diagonal = lambda_path_index(fac, c, req.lambda1, req.lambda2,
                                   Vary::Both, req.maslov, req.lambda_step,
                                   seeds)
                     .index;
  out.right_varying = lambda_path_index(fac, c, req.lambda1, req.lambda2,
                                        Vary::Right, req.maslov,
                                        req.lambda_step, seeds)
                          .index;
  out.left_varying = lambda_path_index(fac, c, req.lambda1, req.lambda2,
                                       Vary::Left, req.maslov,
                                       req.lambda_step, seeds)
                         .index;
  out.identity_holds = out.diagonal == out.right_varying + out.left_varying;
  return out;
}

}  // namespace osc
