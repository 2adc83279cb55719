#include <doctest.h>

#include <cmath>

#include "osc/hamiltonian.hpp"
#include "osc/problems.hpp"

using namespace osc;

namespace {

std::vector<double> unit_grid() {
  std::vector<double> xs;
  for (int i = 0; i <= 20; ++i) xs.push_back(0.05 + 0.9 * i / 20.0);
  return xs;
}

}  // namespace

TEST_CASE("linear pencil: B0 = 0, B1 = I gives B = lambda I") {
  auto zero = [](double) { return Matrix(Matrix::Zero(2, 2)); };
  auto id = [](double) { return Matrix(Matrix::Identity(2, 2)); };
  auto sys = build_linear_pencil(zero, id, 0.0, 1.0, {-1.0, 1.0}, unit_grid());
  CHECK((sys.B(0.3, 0.7) - 0.7 * Matrix::Identity(2, 2)).norm() <= 1e-14);
  CHECK((sys.B_lambda(0.3, 0.7) - Matrix::Identity(2, 2)).norm() <= 1e-14);
  // residual map is exactly (l - l*) I for this class
  Matrix e = residual_map_E(sys, 0.3, 0.9, 0.2);
  CHECK((e - 0.7 * Matrix::Identity(2, 2)).norm() <= 1e-14);
}

TEST_CASE("classical Schrodinger reduction as a linear pencil") {
  auto b0 = [](double x) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -(1.0 + x * x);  // -V(x)
    m(1, 1) = 1.0;
    return m;
  };
  auto b1 = [](double) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    return m;
  };
  auto sys = build_linear_pencil(b0, b1, 0.0, 1.0, {0.0, 5.0}, unit_grid());
  CHECK(sys.B(0.5, 2.0)(0, 0).real() ==
        doctest::Approx(2.0 - (1.0 + 0.25)));
  CHECK(sys.B(0.5, 2.0)(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("linear pencil rejects an indefinite weight") {
  auto zero = [](double) { return Matrix(Matrix::Zero(2, 2)); };
  auto indef = [](double) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
  };
  CHECK_THROWS_AS(
      build_linear_pencil(zero, indef, 0.0, 1.0, {-1.0, 1.0}, unit_grid()),
      ValidationError);
}

TEST_CASE("quadratic builder enforces the positivity margin") {
  auto zero1 = [](double) { return Matrix(Matrix::Zero(1, 1)); };
  auto plus1 = [](double) { return Matrix(Matrix::Identity(1, 1)); };
  // Q1 = 0, Q2 = +1, lambda domain through 0: margin fails at lambda = 0
  CHECK_THROWS_AS(build_quadratic_schrodinger(zero1, zero1, plus1, 0.0, 1.0,
                                              {-1.0, 1.0}, unit_grid()),
                  ValidationError);
  // hydrogen-style: Q2 = -1, lambda < 0 accepted
  auto q2 = [](double) { return Matrix(-Matrix::Identity(1, 1)); };
  auto sys = build_quadratic_schrodinger(zero1, zero1, q2, 0.0, 1.0,
                                         {-3.0, -0.5}, unit_grid());
  CHECK(sys.B(0.5, -1.0)(0, 0).real() == doctest::Approx(-1.0));  // -l^2
  CHECK(sys.B(0.5, -1.0)(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("degenerate reduction: V12 = 0 collapses to the block pencil") {
  auto p11 = [](double) { return Matrix(2.0 * Matrix::Identity(1, 1)); };
  auto v11 = [](double) { return Matrix(0.5 * Matrix::Identity(1, 1)); };
  auto v12z = [](double) { return Matrix(Matrix::Zero(1, 1)); };
  auto v22 = [](double) { return Matrix(5.0 * Matrix::Identity(1, 1)); };
  auto sys = build_degenerate_sturm_liouville(p11, v11, v12z, v22, 1, 2, 0.0,
                                              1.0, {-1.0, 1.0}, unit_grid());
  // B = diag(l - V11, P11^{-1})
  CHECK(sys.B(0.4, 0.7)(0, 0).real() == doctest::Approx(0.7 - 0.5));
  CHECK(sys.B(0.4, 0.7)(1, 1).real() == doctest::Approx(0.5));
  CHECK(sys.B_lambda(0.4, 0.7)(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("degenerate reduction rejects an in-band V22") {
  auto p11 = [](double) { return Matrix(Matrix::Identity(1, 1)); };
  auto v = [](double) { return Matrix(Matrix::Zero(1, 1)); };
  auto v22 = [](double x) {
    return Matrix((0.5 + 1.5 * x) * Matrix::Identity(1, 1));  // range [.5, 2]
  };
  CHECK_THROWS_AS(build_degenerate_sturm_liouville(p11, v, v, v22, 1, 2, 0.0,
                                                   1.0, {0.0, 1.0},
                                                   unit_grid()),
                  ValidationError);
}

TEST_CASE("residual map vanishes at coincident spectral points") {
  HamiltonianSystem sys = hydrogen_system({});
  CHECK(residual_map_E(sys, 1.0, -1.5, -1.5).norm() <= 1e-14);
}

TEST_CASE("quadratic residual identity at the paper's sample point") {
  HydrogenParams p;
  p.delta = 1.0;
  HamiltonianSystem sys = hydrogen_system(p);
  const double x = 1.0, l = -1.0, ls = -2.0;
  Matrix lhs = sys.B(x, l) - sys.B(x, ls);
  Matrix rhs = sys.B_lambda(x, ls) * residual_map_E(sys, x, l, ls);
  CHECK((lhs - rhs).norm() <= 1e-12);
}

TEST_CASE("residual identities for the degenerate and MHD classes") {
  auto p11 = [](double x) { return Matrix((1.5 + x) * Matrix::Identity(1, 1)); };
  auto v11 = [](double x) { return Matrix(std::sin(x) * Matrix::Identity(1, 1)); };
  auto v12 = [](double x) { return Matrix((0.2 + 0.1 * x) * Matrix::Identity(1, 1)); };
  auto v22 = [](double) { return Matrix(6.0 * Matrix::Identity(1, 1)); };
  auto dsl = build_degenerate_sturm_liouville(p11, v11, v12, v22, 1, 2, 0.0,
                                              1.0, {-1.0, 1.0}, unit_grid());
  for (double x : {0.2, 0.8}) {
    Matrix lhs = dsl.B(x, 0.9) - dsl.B(x, -0.4);
    Matrix rhs = dsl.B_lambda(x, -0.4) * residual_map_E(dsl, x, 0.9, -0.4);
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
  }

  HamiltonianSystem mhd = mhd_system({});
  for (double x : {0.002, 0.007}) {
    Matrix lhs = mhd.B(x, -1.04) - mhd.B(x, -1.08);
    Matrix rhs = mhd.B_lambda(x, -1.08) * residual_map_E(mhd, x, -1.04, -1.08);
    CHECK((lhs - rhs).norm() <=
          1e-10 * std::max({1.0, mhd.B(x, -1.04).norm(), lhs.norm()}));
  }
}

TEST_CASE("residual maps are O(|l - l*|) and have derivative near identity") {
  for (const HamiltonianSystem& sys :
       {hydrogen_system({}), mhd_system({})}) {
    const double l0 = 0.5 * (sys.lambda_domain[0] + sys.lambda_domain[1]);
    const double x = sys.name == "mhd" ? 0.005 : 1.3;
    for (double dl : {1e-2, 1e-3, 1e-4}) {
      const Matrix e = residual_map_E(sys, x, l0 + dl, l0);
      CHECK(e.norm() <= 10.0 * dl);
      // centered difference of E in lambda approximates the identity on the
      // weighted block; check || dE/dl - I || = O(|l - l0|) on that block
      const Matrix ep = residual_map_E(sys, x, l0 + dl, l0);
      const Matrix em = residual_map_E(sys, x, l0 - dl, l0);
      const Matrix de = (ep - em) / (2.0 * dl);
      const Matrix bl = sys.B_lambda(x, l0);
      // restrict to directions the weight sees
      CHECK((bl * (de - Matrix::Identity(2, 2))).norm() <=
            5.0 * dl * std::max(1.0, bl.norm()));
    }
  }
}

TEST_CASE("check_assumptions flags a manually indefinite weight") {
  HamiltonianSystem sys;
  sys.n = 1;
  sys.a = 0.0;
  sys.b = 1.0;
  sys.a_kind = sys.b_kind = EndpointKind::Regular;
  sys.lambda_domain = {-1.0, 1.0};
  sys.count_interval = sys.lambda_domain;
  sys.B = [](double, double l) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = l;
    m(1, 1) = -l;
    return m;
  };
  sys.B_lambda = [](double, double) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;  // indefinite
    return m;
  };
  auto rep = check_assumptions(sys, unit_grid(), {-1.0, 0.0, 1.0});
  const auto* a = rep.find("A");
  REQUIRE(a != nullptr);
  CHECK(a->status == CheckStatus::Fail);
  CHECK(a->worst_defect > 0.5);
  CHECK_FALSE(rep.all_checkable_pass());
}

TEST_CASE("built-in problems pass all checkable assumptions") {
  for (const HamiltonianSystem& sys :
       {hydrogen_system({}), mhd_system({}),
        saint_venant_system(saint_venant_synthetic())}) {
    auto rep = check_assumptions(sys, default_x_grid(sys),
                                 default_lambda_grid(sys));
    CAPTURE(sys.name);
    CHECK(rep.all_checkable_pass());
    CHECK(rep.find("F")->status == CheckStatus::Pass);
  }
}
