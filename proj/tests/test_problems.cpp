#include <doctest.h>

#include <cmath>

#include "osc/problems.hpp"

using namespace osc;

TEST_CASE("hydrogen coefficients against a by-hand evaluation") {
  HydrogenParams p;
  p.delta = 2.0;
  HamiltonianSystem sys = hydrogen_system(p);
  const double x = 1.0, l = -1.0;
  const double e = std::exp(-0.5);
  const double q1 = 1.0 * e / (1.0 - 0.5 * e);  // delta/2 = 1
  const double expected = l * q1 - l * l + 4.0 / x;
  CHECK(sys.B(x, l)(0, 0).real() == doctest::Approx(expected).epsilon(1e-14));
  CHECK(sys.B(x, l)(1, 1).real() == doctest::Approx(1.0));
  CHECK(sys.B(x, l)(0, 1) == Complex(0.0));
}

TEST_CASE("hydrogen delta = 0 weight is diag(-2 lambda, 0)") {
  HamiltonianSystem sys = hydrogen_system({});
  CHECK(sys.B_lambda(2.0, -1.5)(0, 0).real() == doctest::Approx(3.0));
  CHECK(sys.B_lambda(2.0, -1.5)(1, 1) == Complex(0.0));
}

TEST_CASE("hydrogen exact eigenvalues -gamma/(2n)") {
  auto eigs = hydrogen_exact_eigenvalues(4.0, 4);
  CHECK(eigs[0] == doctest::Approx(-2.0));
  CHECK(eigs[1] == doctest::Approx(-1.0));
  CHECK(eigs[2] == doctest::Approx(-2.0 / 3.0));
  CHECK(eigs[3] == doctest::Approx(-0.5));
  CHECK(hydrogen_exact_eigenvalues(4.0, 1).size() == 1);
  CHECK(hydrogen_exact_eigenvalues(4.0, 1)[0] == doctest::Approx(-2.0));
}

TEST_CASE("hydrogen rejects a lambda domain touching zero") {
  HydrogenParams p;
  p.lambda_domain = {-1.0, 0.0};
  CHECK_THROWS_AS(hydrogen_system(p), ValidationError);
}

TEST_CASE("MHD field combinations and admissible band") {
  MhdParams p;
  auto c0 = mhd_coefficients(p, 1e-9, -1.05);
  CHECK(c0.F == doctest::Approx(1.0).epsilon(1e-6));
  auto cb = mhd_coefficients(p, p.b, -1.05);
  CHECK(cb.F == doctest::Approx(1.0 / (1.0 + 0.81 * 1e-4)).epsilon(1e-12));

  MhdParams bad;
  bad.lambda_domain = {-1.0, -0.99999};  // intersects the essential band
  CHECK_THROWS_AS(mhd_system(bad), ValidationError);
}

TEST_CASE("MHD analytic lambda-derivative matches finite differences") {
  MhdParams p;
  HamiltonianSystem sys = mhd_system(p);
  for (double x : {1e-4, 0.002, 0.006, 0.0099}) {
    for (double l : {-1.09, -1.05}) {
      const double h = 1e-6;
      Matrix fd = (sys.B(x, l + h) - sys.B(x, l - h)) / (2.0 * h);
      Matrix an = sys.B_lambda(x, l);
      CHECK((fd - an).norm() <= 1e-6 * an.norm());
    }
  }
}

TEST_CASE("MHD hand-differentiated coefficient terms vs finite differences") {
  // V(x; l) itself checked by differencing its closed form in x against the
  // derivative terms it embeds: compare V from mhd_coefficients with a
  // version assembled from numerically differentiated field combinations.
  MhdParams p;
  const double l = -1.06;
  for (double x : {0.001, 0.004, 0.008}) {
    auto c = mhd_coefficients(p, x, l);
    const double h = 1e-6 * std::max(x, 1e-3);
    auto bth2_over_x2 = [&](double t) {
      const double den = 1.0 + p.kappa * p.kappa * t * t;
      const double bth = p.B0 * p.kappa * t / den;
      return bth * bth / (t * t);
    };
    auto cross = [&](double t) {
      const double den = 1.0 + p.kappa * p.kappa * t * t;
      const double bth = p.B0 * p.kappa * t / den;
      const double g = p.B0 * (p.m / t - p.k * p.kappa * t) / den;
      return 2.0 * p.k * bth * g / (p.m * p.m + p.k * p.k * t * t);
    };
    const double d1 = (bth2_over_x2(x + h) - bth2_over_x2(x - h)) / (2 * h);
    const double d2 = (cross(x + h) - cross(x - h)) / (2 * h);
    const double den = 1.0 + p.kappa * p.kappa * x * x;
    const double bth = p.B0 * p.kappa * x / den;
    const double F = p.B0 * (p.m * p.kappa + p.k) / den;
    const double mm = p.m * p.m + p.k * p.k * x * x;
    const double core = p.mu0 * p.rho0 * l + F * F;
    const double v_ref = core / x + d1 -
                         4.0 * p.k * p.k * bth * bth * F * F / (x * mm * core) +
                         d2;
    CHECK(c.V == doctest::Approx(v_ref).epsilon(1e-6));
  }
}

TEST_CASE("MHD Frobenius exponent") {
  MhdParams p;
  CHECK(mhd_frobenius_exponent(p, -1.05, 0.0) == doctest::Approx(1.0));
  // even in mu
  CHECK(mhd_frobenius_exponent(p, -1.05, 0.01) ==
        doctest::Approx(mhd_frobenius_exponent(p, -1.05, -0.01)));
}

TEST_CASE("Saint-Venant boundary matrix identities") {
  SaintVenantProblem p = saint_venant_synthetic();
  HamiltonianSystem sys = saint_venant_system(p);
  const Matrix al = (*sys.alpha)(0.8);
  CHECK((al * apply_j(al.adjoint())).norm() <= 1e-14);
  // alpha J d_lambda alpha* = -c2 > 0
  const double h = 1e-7;
  const Matrix dal = (((*sys.alpha)(0.8 + h)) - ((*sys.alpha)(0.8 - h))) /
                     (2.0 * h);
  CHECK((al * apply_j(dal.adjoint()))(0, 0).real() ==
        doctest::Approx(-p.c2).epsilon(1e-6));
  CHECK(sys.B(0.5, 1.0)(0, 0).real() == doctest::Approx(2.0));  // l + l^2
  CHECK(sys.B(0.5, 1.0)(1, 1).real() == doctest::Approx(-1.0));
}

TEST_CASE("Saint-Venant rejects sign-violating coefficients") {
  SaintVenantProblem p = saint_venant_synthetic();
  p.q1 = [](double) { return 0.5; };  // must be <= -delta
  CHECK_THROWS_AS(saint_venant_system(p), ValidationError);
  SaintVenantProblem q = saint_venant_synthetic();
  q.c2 = 0.5;
  CHECK_THROWS_AS(saint_venant_system(q), ValidationError);
}

TEST_CASE("problems load from JSON configuration") {
  auto sys = problem_from_json(
      R"({"class": "hydrogen", "delta": 1.5, "lambda_domain": [-2.5, -0.7]})");
  CHECK(sys.name == "hydrogen");
  CHECK(sys.count_interval[0] == doctest::Approx(-2.5));
  CHECK(sys.count_interval[1] == doctest::Approx(-0.7));

  auto mhd = problem_from_json(R"({"class": "mhd", "m": -1, "k": 1})");
  CHECK(mhd.name == "mhd");

  CHECK_THROWS_AS(problem_from_json(R"({"class": "nope"})"), ValidationError);
  CHECK_THROWS_AS(problem_from_json("not json"), ValidationError);
  CHECK_THROWS_AS(problem_from_json(R"({"n": 1})"), ValidationError);
}
