#include "osc/problems.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace osc {

// ---- hydrogen quadratic Schrodinger family ------------------------------------

namespace {

double hydrogen_q1(double x, double delta) {
  const double e = std::exp(-0.5 * x);
  return 0.5 * delta * e / (1.0 - 0.5 * e);
}

}  // namespace

HamiltonianSystem hydrogen_system(const HydrogenParams& p) {
  if (p.gamma <= 0) throw ValidationError("hydrogen: gamma must be positive");
  if (p.delta < 0) throw ValidationError("hydrogen: delta must be >= 0");
  if (p.lambda_domain[1] >= 0)
    throw ValidationError(
        "hydrogen: lambda domain must satisfy lambda2 < 0 (positivity of the "
        "spectral weight)");

  const double gamma = p.gamma, delta = p.delta;
  HamiltonianSystem sys;
  sys.n = 1;
  sys.a = 0.0;
  sys.b = kInf;
  sys.a_kind = EndpointKind::Singular;
  sys.b_kind = EndpointKind::Singular;
  sys.lambda_domain = {std::min(p.lambda_domain[0], -6.0),
                       std::max(p.lambda_domain[1], -0.02)};
  sys.count_interval = p.lambda_domain;
  sys.B = [gamma, delta](double x, double l) {
    Matrix m(2, 2);
    m << Complex(l * hydrogen_q1(x, delta) - l * l + gamma / x), Complex(0.0),
        Complex(0.0), Complex(1.0);
    return m;
  };
  sys.B_lambda = [delta](double x, double l) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = hydrogen_q1(x, delta) - 2.0 * l;
    return m;
  };
  sys.coeff_class = CoefficientClass::QuadraticSchrodinger;
  sys.residual_E = [delta](double x, double l, double ls) {
    Matrix e = Matrix::Zero(2, 2);
    const double q1 = hydrogen_q1(x, delta);
    e(0, 0) = (l - ls) * (q1 + (l + ls) * (-1.0)) / (q1 - 2.0 * ls);
    return e;
  };
  sys.name = "hydrogen";
  return sys;
}

std::vector<double> hydrogen_exact_eigenvalues(double gamma, int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k) out.push_back(-gamma / (2.0 * k));
  return out;
}

// ---- Hain-Lust MHD -------------------------------------------------------------

MhdCoefficients mhd_coefficients(const MhdParams& p, double x, double lambda) {
  if (p.m == 0) throw ValidationError("mhd: m must be nonzero");
  const double B0 = p.B0, kap = p.kappa, m = p.m, k = p.k;
  const double den = 1.0 + kap * kap * x * x;

  const double Btheta = B0 * kap * x / den;
  const double Bz = B0 / den;
  const double F = (m * kap + k) * B0 / den;
  // G = m Bz / x - k Btheta; only the combinations below are needed and they
  // stay regular at x = 0.
  const double G = B0 * (m / x - k * kap * x) / den;  // used only for x > 0

  const double mm = m * m + k * k * x * x;
  const double core = p.mu0 * p.rho0 * lambda + F * F;
  if (std::abs(core) < 1e-14)
    throw ValidationError("mhd: mu0 rho0 lambda + F^2 vanishes "
                          "(essential-spectrum collision)");

  // d/dx [ Btheta^2 / x^2 ] with Btheta^2/x^2 = B0^2 kap^2 / den^2.
  const double d_btheta2_over_x2 =
      -4.0 * B0 * B0 * std::pow(kap, 4) * x / std::pow(den, 3);

  // d/dx [ 2 k Btheta G / (m^2 + k^2 x^2) ]; the product Btheta*G is regular:
  // Btheta G = B0^2 kap (m - k kap x^2) / den^2.
  const double u = 2.0 * k * B0 * B0 * kap * (m - k * kap * x * x);
  const double du = 2.0 * k * B0 * B0 * kap * (-2.0 * k * kap * x);
  const double w = den * den * mm;
  const double dw = 2.0 * den * (2.0 * kap * kap * x) * mm + den * den * (2.0 * k * k * x);
  const double d_cross = (du * w - u * dw) / (w * w);

  const double P = core * x / mm;
  const double V = core / x + d_btheta2_over_x2 -
                   4.0 * k * k * Btheta * Btheta * F * F / (x * mm * core) +
                   d_cross;

  MhdCoefficients out;
  out.P = P;
  out.V = V;
  out.F = F;
  out.G = G;
  out.B = Matrix::Zero(2, 2);
  out.B(0, 0) = V;
  out.B(1, 1) = -1.0 / P;
  return out;
}

namespace {

// Validated lambda domains avoid -ran(F^2 / (mu0 rho0)).
void mhd_validate_domain(const MhdParams& p) {
  const double Fmax = p.B0 * (p.m * p.kappa + p.k);  // at x = 0
  const double Fmin = Fmax / (1.0 + p.kappa * p.kappa * p.b * p.b);
  const double lo = -Fmax * Fmax / (p.mu0 * p.rho0);
  const double hi = -Fmin * Fmin / (p.mu0 * p.rho0);
  if (!(p.lambda_domain[1] < lo || p.lambda_domain[0] > hi)) {
    std::ostringstream os;
    os << "mhd: lambda domain [" << p.lambda_domain[0] << ", "
       << p.lambda_domain[1] << "] intersects the essential band [" << lo
       << ", " << hi << "]";
    throw ValidationError(os.str());
  }
}

}  // namespace

HamiltonianSystem mhd_system(const MhdParams& p) {
  if (p.m == 0) throw ValidationError("mhd: m must be nonzero");
  mhd_validate_domain(p);

  HamiltonianSystem sys;
  sys.n = 1;
  sys.a = 0.0;
  sys.b = p.b;
  sys.a_kind = EndpointKind::Singular;
  sys.b_kind = EndpointKind::Regular;
  {
    // Widen to the full validated branch on this side of the essential band.
    const double Fmax = p.B0 * (p.m * p.kappa + p.k);
    const double Fmin = Fmax / (1.0 + p.kappa * p.kappa * p.b * p.b);
    const double band_lo = -Fmax * Fmax / (p.mu0 * p.rho0);
    const double band_hi = -Fmin * Fmin / (p.mu0 * p.rho0);
    const double pad = 1e-9 * std::abs(band_lo);
    if (p.lambda_domain[1] < band_lo)
      sys.lambda_domain = {std::min(p.lambda_domain[0], -6.0 * std::abs(band_lo)),
                           band_lo - pad};
    else
      sys.lambda_domain = {band_hi + pad, -pad};
  }
  sys.count_interval = p.lambda_domain;
  sys.B = [p](double x, double l) { return mhd_coefficients(p, x, l).B; };
  sys.B_lambda = [p](double x, double l) {
    const double B0 = p.B0, kap = p.kappa, m = p.m, k = p.k;
    const double den = 1.0 + kap * kap * x * x;
    const double Btheta = B0 * kap * x / den;
    const double F = (m * kap + k) * B0 / den;
    const double mm = m * m + k * k * x * x;
    const double core = p.mu0 * p.rho0 * l + F * F;
    Matrix out = Matrix::Zero(2, 2);
    out(0, 0) = p.rho0 * p.mu0 / x +
                4.0 * k * k * p.rho0 * p.mu0 * Btheta * Btheta * F * F /
                    (x * mm * core * core);
    out(1, 1) = p.rho0 * p.mu0 * mm / (x * core * core);
    return out;
  };
  // Dirichlet condition chi(b) = 0 at the regular right endpoint:
  // alpha = (1 0), constant in lambda.
  sys.alpha = [](double) {
    Matrix a(1, 2);
    a << Complex(1.0), Complex(0.0);
    return a;
  };
  sys.alpha_side = EndSide::Right;
  sys.coeff_class = CoefficientClass::Mhd;
  sys.residual_E = [p](double x, double l, double ls) {
    const double B0 = p.B0, kap = p.kappa, m = p.m, k = p.k;
    const double den = 1.0 + kap * kap * x * x;
    const double Btheta = B0 * kap * x / den;
    const double F = (m * kap + k) * B0 / den;
    const double mm = m * m + k * k * x * x;
    const double cl = p.mu0 * p.rho0 * l + F * F;
    const double cs = p.mu0 * p.rho0 * ls + F * F;
    const double t = 4.0 * k * k * Btheta * Btheta * F * F / mm;
    Matrix e = Matrix::Zero(2, 2);
    e(0, 0) = (l - ls) * (1.0 + t / (cl * cs)) / (1.0 + t / (cs * cs));
    e(1, 1) = (l - ls) * cs / cl;
    return e;
  };
  sys.name = "mhd";
  return sys;
}

double mhd_frobenius_exponent(const MhdParams& p, double lambda, double mu) {
  const double F0 = p.B0 * (p.m * p.kappa + p.k);
  const double core = p.mu0 * p.rho0 * lambda + F0 * F0;
  const double num = (p.mu0 * p.rho0 * (lambda + mu) + F0 * F0) *
                     (p.mu0 * p.rho0 * (lambda - mu) + F0 * F0);
  if (num < 0)
    throw ValidationError("mhd: Frobenius exponent branch leaves the real "
                          "axis for this mu");
  return std::sqrt(num) / std::abs(core) * std::abs(static_cast<double>(p.m));
}

// ---- Saint-Venant form ----------------------------------------------------------

HamiltonianSystem saint_venant_system(const SaintVenantProblem& p) {
  if (!(p.c2 < 0)) throw ValidationError("saint-venant: c2 must be negative");
  // Sampled sign conditions: q1, q2 bounded away from 0 from below.
  for (int i = 0; i <= 50; ++i) {
    const double x = -p.x_max * i / 50.0;
    if (!(p.q1(x) < -1e-12) || !(p.q2(x) < -1e-12)) {
      std::ostringstream os;
      os << "saint-venant: q1/q2 not bounded away from 0 at z = " << x;
      throw ValidationError(os.str());
    }
  }

  auto v = p.v;
  auto q1 = p.q1;
  auto q2 = p.q2;
  HamiltonianSystem sys;
  sys.n = 1;
  sys.a = 0.0;
  sys.b = kInf;
  sys.a_kind = EndpointKind::Regular;
  sys.b_kind = EndpointKind::Singular;
  sys.lambda_domain = p.lambda_domain;
  sys.count_interval = p.lambda_domain;
  sys.B = [v, q1, q2](double x, double l) {
    Matrix m(2, 2);
    m << Complex(-v(-x) - q1(-x) * l - q2(-x) * l * l), Complex(0.0),
        Complex(0.0), Complex(-1.0);
    return m;
  };
  sys.B_lambda = [q1, q2](double x, double l) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -q1(-x) - 2.0 * l * q2(-x);
    return m;
  };
  const double c1 = p.c1, c2 = p.c2;
  sys.alpha = [c1, c2](double l) {
    Matrix a(1, 2);
    a << Complex(c1 + c2 * l), Complex(-1.0);
    return a;
  };
  sys.alpha_side = EndSide::Left;
  sys.coeff_class = CoefficientClass::QuadraticSchrodinger;
  sys.residual_E = [q1, q2](double x, double l, double ls) {
    Matrix e = Matrix::Zero(2, 2);
    const double w = -q1(-x) - 2.0 * ls * q2(-x);
    e(0, 0) = (l - ls) * (-q1(-x) - (l + ls) * q2(-x)) / w;
    return e;
  };
  sys.name = "saint-venant";
  return sys;
}

SaintVenantProblem saint_venant_synthetic() {
  SaintVenantProblem p;
  p.v = [](double) { return 0.0; };
  p.q1 = [](double) { return -1.0; };
  p.q2 = [](double) { return -1.0; };
  p.c1 = 0.0;
  p.c2 = -1.0;
  p.lambda_domain = {0.25, 2.0};
  return p;
}

// ---- JSON loading ----------------------------------------------------------------

HamiltonianSystem problem_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  if (!j.contains("class"))
    throw ValidationError("config missing \"class\"");
  const std::string cls = j["class"].get<std::string>();

  auto lambda_domain = [&](std::array<double, 2> dflt) {
    if (!j.contains("lambda_domain")) return dflt;
    const auto& d = j["lambda_domain"];
    if (!d.is_array() || d.size() != 2)
      throw ValidationError("lambda_domain must be [lo, hi]");
    return std::array<double, 2>{d[0].get<double>(), d[1].get<double>()};
  };
  auto num = [&](const char* key, double dflt) {
    return j.contains(key) ? j[key].get<double>() : dflt;
  };

  if (cls == "hydrogen") {
    HydrogenParams p;
    p.gamma = num("gamma", p.gamma);
    p.delta = num("delta", p.delta);
    p.lambda_domain = lambda_domain(p.lambda_domain);
    return hydrogen_system(p);
  }
  if (cls == "mhd") {
    MhdParams p;
    p.b = num("b", p.b);
    p.m = static_cast<int>(num("m", p.m));
    p.k = static_cast<int>(num("k", p.k));
    p.B0 = num("B0", p.B0);
    p.kappa = num("kappa", p.kappa);
    p.rho0 = num("rho0", p.rho0);
    p.mu0 = num("mu0", p.mu0);
    p.lambda_domain = lambda_domain(p.lambda_domain);
    return mhd_system(p);
  }
  if (cls == "saint-venant-synthetic") {
    SaintVenantProblem p = saint_venant_synthetic();
    p.c1 = num("c1", p.c1);
    p.c2 = num("c2", p.c2);
    p.lambda_domain = lambda_domain(p.lambda_domain);
    return saint_venant_system(p);
  }
  throw ValidationError("unknown problem class: " + cls);
}

}  // namespace osc
