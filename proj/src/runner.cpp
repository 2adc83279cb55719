#include "osc/runner.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "osc/greens.hpp"

namespace osc {

using nlohmann::json;

std::string csv_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

namespace {

void apply_presets(ProblemHandle& h) {
  const std::string& name = h.sys.name;
  if (name == "hydrogen") {
    h.eps = 1e-10;
    h.probe_left = 1e-10;
    h.probe_right = 50.0;
    h.window_lo = 1e-10;
    h.window_hi = 10.0;
    h.base_c = 1.0;
    h.x_step = 1e-3;
    h.lambda_step = 5e-3;
    Vector target(2);
    target << Complex(0.0), Complex(1.0);
    h.left_spec = PhysicalVectorSpec{target, h.eps};
    h.right_spec = std::monostate{};  // limit point at +inf
    h.default_lambda0 = -1.0;
  } else if (name == "mhd") {
    const double b = h.sys.b;
    h.eps = 1e-7;
    h.probe_left = 1e-7;
    h.probe_right = b;
    h.window_lo = 1e-5;
    h.window_hi = b;
    h.base_c = b;
    h.x_step = 1e-6;
    h.lambda_step = 1e-4;
    h.left_spec = std::monostate{};  // limit point at 0
    h.right_spec = RegularAlphaSpec{};
    h.default_lambda0 =
        0.5 * (h.sys.count_interval[0] + h.sys.count_interval[1]);
    // The probe shift must stay below the distance to the essential band,
    // or the Frobenius exponents of the shifted system blow the
    // probe-matrix scale past double range.
    h.default_mu0 = Complex(0.0, 0.02);
  } else if (name == "saint-venant") {
    h.eps = 1e-10;
    h.probe_left = 0.0;
    h.probe_right = 30.0;
    h.window_lo = 0.0;
    h.window_hi = 15.0;
    h.base_c = 1.0;
    h.x_step = 1e-3;
    h.lambda_step = 5e-3;
    h.left_spec = RegularAlphaSpec{};
    h.right_spec = std::monostate{};
    h.default_lambda0 =
        0.5 * (h.sys.count_interval[0] + h.sys.count_interval[1]);
  } else {
    // Generic: finite window inside the interval.
    const double lo = std::isfinite(h.sys.a) ? h.sys.a : -10.0;
    const double hi = std::isfinite(h.sys.b) ? h.sys.b : 10.0;
    h.eps = 1e-8;
    h.window_lo = std::isfinite(h.sys.a) &&
                          h.sys.a_kind == EndpointKind::Singular
                      ? lo + h.eps
                      : lo;
    h.window_hi = std::isfinite(h.sys.b) &&
                          h.sys.b_kind == EndpointKind::Singular
                      ? hi - h.eps
                      : hi;
    h.probe_left = h.window_lo;
    h.probe_right = h.sys.b_kind == EndpointKind::Singular &&
                            !std::isfinite(h.sys.b)
                        ? 2.0 * hi
                        : h.window_hi;
    h.base_c = 0.5 * (h.window_lo + h.window_hi);
    h.x_step = (h.window_hi - h.window_lo) / 2000.0;
    h.lambda_step =
        (h.sys.lambda_domain[1] - h.sys.lambda_domain[0]) / 200.0;
    h.left_spec = h.sys.alpha && h.sys.alpha_side == EndSide::Left
                      ? BoundarySpec{RegularAlphaSpec{}}
                      : BoundarySpec{std::monostate{}};
    h.right_spec = h.sys.alpha && h.sys.alpha_side == EndSide::Right
                       ? BoundarySpec{RegularAlphaSpec{}}
                       : BoundarySpec{std::monostate{}};
    h.default_lambda0 =
        0.5 * (h.sys.count_interval[0] + h.sys.count_interval[1]);
  }
}

}  // namespace

ProblemHandle make_problem(const std::string& name,
                           const std::string& params_json) {
  json j = params_json.empty() ? json::object() : json::parse(params_json);
  j["class"] = name;
  ProblemHandle h;
  h.sys = problem_from_json(j.dump());
  apply_presets(h);
  return h;
}

ProblemHandle make_problem_from_config(const std::string& config_json) {
  ProblemHandle h;
  h.sys = problem_from_json(config_json);
  apply_presets(h);
  return h;
}

CountRequest make_count_request(const ProblemHandle& h,
                                const RunOptions& opt) {
  CountRequest req;
  req.sys = &h.sys;
  req.lambda1 = std::isfinite(opt.lambda1) ? opt.lambda1
                                           : h.sys.count_interval[0];
  req.lambda2 = std::isfinite(opt.lambda2) ? opt.lambda2
                                           : h.sys.count_interval[1];
  if (!(req.lambda1 < req.lambda2))
    throw ValidationError("need lambda1 < lambda2");
  if (!h.sys.lambda_in_domain(req.lambda1) ||
      !h.sys.lambda_in_domain(req.lambda2))
    throw ValidationError("[lambda1, lambda2] outside the validated domain");

  req.left_spec = h.left_spec;
  req.right_spec = h.right_spec;
  req.window_lo = h.window_lo;
  req.window_hi = opt.xmax > 0 ? opt.xmax : h.window_hi;
  req.probe_left = h.probe_left;
  req.probe_right = h.probe_right;
  req.base_c = h.base_c;
  req.x_step = opt.x_step > 0 ? opt.x_step : h.x_step;
  req.lambda_step = opt.lambda_step > 0 ? opt.lambda_step : h.lambda_step;
  if (opt.eps > 0) {
    req.window_lo = h.sys.a_kind == EndpointKind::Singular &&
                            std::isfinite(h.sys.a)
                        ? h.sys.a + opt.eps
                        : req.window_lo;
    if (auto* pv = std::get_if<PhysicalVectorSpec>(&req.left_spec))
      pv->eps = opt.eps;
  }
  if (opt.tol_rel > 0) req.integ.rel_tol = opt.tol_rel;
  if (opt.tol_abs > 0) req.integ.abs_tol = opt.tol_abs;
  return req;
}

// ---- classify -----------------------------------------------------------------

namespace {

json classification_json(const NiessenProbe& probe,
                         const EndpointClassification& cls) {
  json out;
  out["m"] = cls.m;
  out["case"] = cls.label == LimitCase::LimitPoint    ? "limit-point"
                : cls.label == LimitCase::LimitCircle ? "limit-circle"
                                                      : "limit-m";
  out["finite_paths"] = cls.finite_paths;
  out["divergent_paths"] = cls.divergent_paths;
  out["limits"] = cls.limits;
  out["low_confidence"] = cls.low_confidence;
  if (!cls.note.empty()) out["note"] = cls.note;
  json table = json::array();
  for (const auto& pt : probe.points) {
    json row;
    row["x"] = pt.x;
    row["values"] = std::vector<double>(pt.values.data(),
                                        pt.values.data() + pt.values.size());
    table.push_back(row);
  }
  out["probe_table"] = table;
  return out;
}

}  // namespace

std::string cmd_classify(const ProblemHandle& h, const RunOptions& opt) {
  const Complex mu0 = opt.mu0 == Complex(0.0, 0.0) ? h.default_mu0 : opt.mu0;
  if (mu0.imag() == 0.0)
    throw ValidationError("classification probe needs Im mu0 != 0");
  const double lambda0 =
      std::isfinite(opt.lambda0) ? opt.lambda0 : h.default_lambda0;
  if (!h.sys.lambda_in_domain(lambda0))
    throw ValidationError("lambda0 outside the validated domain");
  const double eps = opt.eps > 0 ? opt.eps : h.eps;
  const double horizon = opt.xmax > 0 ? opt.xmax : h.window_hi;

  IntegratorConfig cfg;
  if (opt.tol_rel > 0) cfg.rel_tol = opt.tol_rel;
  if (opt.tol_abs > 0) cfg.abs_tol = opt.tol_abs;

  json out;
  out["problem"] = h.sys.name;
  out["mu0"] = {mu0.real(), mu0.imag()};
  out["lambda0"] = lambda0;

  for (EndSide side : {EndSide::Left, EndSide::Right}) {
    const char* key = side == EndSide::Left ? "left" : "right";
    if (h.sys.kind(side) == EndpointKind::Regular) {
      json reg;
      reg["kind"] = "regular";
      reg["m"] = h.sys.dim();
      reg["case"] = "limit-circle";
      out["endpoints"][key] = reg;
      continue;
    }
    const auto probes =
        default_probe_points(h.sys, side, eps, horizon, 4);
    NiessenProbe probe =
        eigen_probe(h.sys, mu0, lambda0, h.base_c, probes, side, cfg);
    EndpointClassification cls = classify_endpoint(probe);
    json cj = classification_json(probe, cls);
    cj["kind"] = "singular";
    out["endpoints"][key] = cj;
  }
  return out.dump(2);
}

// ---- count / box / curves -------------------------------------------------------

namespace {

json crossing_json(const Crossing& c) {
  json j;
  j["t"] = c.t;
  j["multiplicity"] = c.multiplicity;
  j["direction"] = c.direction;
  j["counted"] = c.counted;
  j["boundary"] = c.boundary == CrossingBoundary::Interior    ? "interior"
                  : c.boundary == CrossingBoundary::Departure ? "departure"
                                                              : "arrival";
  return j;
}

json path_json(const MaslovPathResult& r) {
  json j;
  j["index"] = r.index;
  j["persistent_paths"] = r.persistent_paths;
  json cs = json::array();
  for (const auto& c : r.crossings)
    if (c.counted) cs.push_back(crossing_json(c));
  j["crossings"] = cs;
  return j;
}

}  // namespace

std::string cmd_count(const ProblemHandle& h, const RunOptions& opt) {
  CountRequest req = make_count_request(h, opt);
  CountResult res = count_eigenvalues(req);
  const int nullity_sum = count_via_nullity_sum(req);

  json out;
  out["problem"] = h.sys.name;
  out["lambda1"] = req.lambda1;
  out["lambda2"] = req.lambda2;
  out["count"] = res.count;
  out["principal_index"] = res.principal_index;
  out["bottom_shelf_correction"] = res.bottom_correction;
  out["nullity_sum"] = nullity_sum;
  out["nullity_consistent"] = nullity_sum == res.principal_index;
  json cs = json::array();
  for (const auto& c : res.crossings)
    if (c.counted) cs.push_back(crossing_json(c));
  out["crossings"] = cs;
  out["equality"] = res.equality == EqualityStatus::Equality
                        ? "equality"
                        : res.equality == EqualityStatus::InequalityOnly
                              ? "inequality-only"
                              : "undetermined";
  out["nonintersection_margin"] = res.nonintersection_margin;
  out["window_stable"] = res.window_stable;
  out["lambda2_is_eigenvalue"] = res.lambda2_is_eigenvalue;
  out["notes"] = res.notes;
  return out.dump(2);
}

std::string cmd_box(const ProblemHandle& h, const RunOptions& opt) {
  CountRequest req = make_count_request(h, opt);
  MaslovBoxResult box = maslov_box(req);
  json out;
  out["problem"] = h.sys.name;
  out["lambda1"] = req.lambda1;
  out["lambda2"] = req.lambda2;
  out["window"] = {box.window_lo, box.window_hi};
  for (const ShelfResult* s : {&box.bottom, &box.right, &box.top, &box.left}) {
    json sj = path_json(s->path);
    sj["oriented_sign"] = s->oriented_sign;
    sj["oriented_index"] = s->oriented_sign * s->path.index;
    out["shelves"][s->name] = sj;
  }
  out["closure_sum"] = box.closure_sum;
  out["closure_ok"] = box.closure_sum == 0;
  return out.dump(2);
}

std::string cmd_curves(const ProblemHandle& h, const RunOptions& opt,
                       std::string* csv) {
  CountRequest req = make_count_request(h, opt);
  SpectralCurveSet set = trace_spectral_curves(req);

  if (csv) {
    std::ostringstream os;
    os << "curve_id,lambda,x,multiplicity\n";
    for (const auto& c : set.curves)
      for (const auto& p : c.points)
        os << c.id << ',' << csv_double(p.lambda) << ',' << csv_double(p.x)
           << ',' << p.multiplicity << '\n';
    *csv = os.str();
  }

  json out;
  out["problem"] = h.sys.name;
  out["lambda1"] = req.lambda1;
  out["lambda2"] = req.lambda2;
  out["n_curves"] = set.curves.size();
  out["intercepts"] = set.intercepts;
  json curves = json::array();
  for (const auto& c : set.curves) {
    json cj;
    cj["id"] = c.id;
    cj["points"] = c.points.size();
    if (c.intercept) cj["intercept"] = *c.intercept;
    cj["fragmented"] = c.fragmented;
    if (!c.points.empty()) {
      cj["lambda_min"] = c.points.front().lambda;
      cj["lambda_max"] = c.points.back().lambda;
    }
    curves.push_back(cj);
  }
  out["curves"] = curves;
  return out.dump(2);
}

// ---- verify ---------------------------------------------------------------------

std::string cmd_verify(const ProblemHandle& h, const RunOptions& opt) {
  json out;
  out["problem"] = h.sys.name;

  // Assumption report on default grids.
  AssumptionReport rep = check_assumptions(h.sys, default_x_grid(h.sys),
                                           default_lambda_grid(h.sys));
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cj;
    cj["label"] = c.label;
    cj["status"] = c.status == CheckStatus::Pass   ? "pass"
                   : c.status == CheckStatus::Fail ? "fail"
                                                   : "not-checkable";
    cj["worst_defect"] = c.worst_defect;
    cj["witness_x"] = c.witness_x;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(cj);
  }
  out["assumptions"] = checks;
  out["assumptions_pass"] = rep.all_checkable_pass();

  // Green's-function residual on a truncation with a manufactured forcing.
  try {
    CountRequest req = make_count_request(h, RunOptions{});
    const double c = req.base_c;
    const double bp = req.window_hi -
                      0.05 * (req.window_hi - req.window_lo);
    FramePairFactory fac(req);
    const FramePath& right = fac.right(req.lambda2);
    const Matrix rb = orthonormalize_columns(right.eval(c));
    GreensAssembly g = make_greens_assembly(h.sys, req.lambda2, c, bp,
                                            choose_gamma(rb), rb, req.integ);
    out["greens"]["E_condition"] = g.E_condition;
    out["greens"]["M_antihermitian_defect"] = (g.M + g.M.adjoint()).norm();
    auto f = [&](double x) {
      Vector v(h.sys.dim());
      for (int i = 0; i < v.size(); ++i)
        v(i) = std::sin((i + 1) * x / (bp - c + 1.0));
      return v;
    };
    std::vector<double> xs;
    for (int i = 0; i <= 12; ++i) xs.push_back(c + (bp - c) * i / 12.0);
    auto sol = solve_inhomogeneous(g, f, xs);
    out["greens"]["ode_residual"] = sol.max_ode_residual;
    out["greens"]["left_boundary_residual"] = sol.boundary_residual_left;
    out["greens"]["right_boundary_residual"] = sol.boundary_residual_right;
  } catch (const std::exception& e) {
    out["greens"]["error"] = e.what();
  }

  return out.dump(2);
}

}  // namespace osc
