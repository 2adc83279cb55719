#include <doctest.h>

#include <cmath>

#include "osc/niessen.hpp"
#include "osc/problems.hpp"

using namespace osc;

namespace {

const double kEps = 1e-10;

NiessenProbe hydrogen_left_probe() {
  static HamiltonianSystem sys = hydrogen_system({});
  auto probes = default_probe_points(sys, EndSide::Left, kEps, 10.0, 4);
  return eigen_probe(sys, Complex(0, 1), -1.0, 1.0, probes, EndSide::Left);
}

}  // namespace

TEST_CASE("hydrogen left probe reproduces the published eigen-data") {
  NiessenProbe probe = hydrogen_left_probe();
  const auto& deep = probe.points.back();
  CHECK(deep.x == doctest::Approx(kEps));
  CHECK(deep.values(0) == doctest::Approx(-1.3305).epsilon(2e-3));
  CHECK(deep.values(1) == doctest::Approx(0.1879).epsilon(2e-3));
  // eigenvector of the lowest path, phase-fixed
  CHECK(deep.vectors(0, 0).real() == doctest::Approx(0.8631).epsilon(2e-3));
  CHECK(deep.vectors(1, 0).real() == doctest::Approx(-0.1762).epsilon(3e-3));
  CHECK(deep.vectors(1, 0).imag() == doctest::Approx(0.4733).epsilon(3e-3));

  auto cls = classify_endpoint(probe);
  CHECK(cls.m == 2);
  CHECK(cls.label == LimitCase::LimitCircle);
}

TEST_CASE("hydrogen right probe is limit-point with the paired divergence") {
  HamiltonianSystem sys = hydrogen_system({});
  auto probes = default_probe_points(sys, EndSide::Right, kEps, 10.0, 4);
  NiessenProbe probe =
      eigen_probe(sys, Complex(0, 1), -1.0, 1.0, probes, EndSide::Right);
  auto cls = classify_endpoint(probe);
  CHECK(cls.m == 1);
  CHECK(cls.label == LimitCase::LimitPoint);
  CHECK(probe.points.back().values(1) > 1e6);
}

TEST_CASE("imaginary-shift eigenpair pairing nu -> -1/((2 Im mu)^2 nu)") {
  HamiltonianSystem sys = hydrogen_system({});
  const Complex mu(0, 1);
  ProbePath p = integrate_probe(sys, mu, -1.0, 1.0, 4.0, {});
  for (double x : {2.0, 3.0, 4.0}) {
    Matrix a = (symplectic_j(1) / Complex(0, 1)) / (2.0 * mu.imag()) +
               p.weight(x);
    auto e = hermitian_eigen(a);
    for (int j = 0; j < 2; ++j) {
      const double nu = e.values(j);
      const double partner = -1.0 / (4.0 * nu);
      const Vector jv = apply_j(Matrix(e.vectors.col(j).conjugate())).col(0);
      CHECK((a * jv - partner * jv).norm() <=
            1e-8 * std::max(1.0, std::abs(partner)) * jv.norm());
    }
  }
}

TEST_CASE("real-lambda probe starts at zero and is non-decreasing") {
  HamiltonianSystem sys = hydrogen_system({});
  ProbePath p = integrate_probe(sys, 0.0, -1.0, 1.0, 9.0, {});
  CHECK(p.weight(1.0).norm() <= 1e-12);
  double prev0 = -1e300, prev1 = -1e300;
  for (double x : {2.0, 4.0, 6.0, 8.0}) {
    auto e = hermitian_eigen(p.weight(x));
    CHECK(e.values(0) >= prev0 - 1e-8 * (1 + std::abs(e.values(0))));
    CHECK(e.values(1) >= prev1 - 1e-8 * (1 + std::abs(e.values(1))));
    prev0 = e.values(0);
    prev1 = e.values(1);
  }
}

TEST_CASE("Niessen elements on the hydrogen beta circle") {
  NiessenProbe probe = hydrogen_left_probe();
  auto cls = classify_endpoint(probe);
  auto set = niessen_elements(probe, cls);
  REQUIRE(set.r == 1);
  CHECK(std::abs(set.beta[0]) == doctest::Approx(2.6609).epsilon(2e-3));
  CHECK(set.gamma[0] == -set.beta[0]);
  CHECK(std::abs(set.gamma[0]) == doctest::Approx(std::abs(set.beta[0])));
  // R(mu-bar)^* J R(mu) = 0 becomes R^T J R = 0 for real coefficients
  const Matrix r = set.R;
  const Complex bilinear =
      (r.transpose() * apply_j(r))(0, 0);
  CHECK(std::abs(bilinear) <= 1e-6);
}

TEST_CASE("limit-point endpoints need no beta circle") {
  HamiltonianSystem sys = mhd_system({});
  std::vector<double> probes{1e-4, 1e-5, 1e-6, 1e-7};
  NiessenProbe probe =
      eigen_probe(sys, 0.0, -1.1, 0.01, probes, EndSide::Left);
  EndpointClassification cls;
  cls.m = 1;
  cls.label = LimitCase::LimitPoint;
  cls.finite_paths = {1};
  auto set = niessen_elements(probe, cls);
  CHECK(set.r == 0);
  CHECK(set.beta.empty());
}

TEST_CASE("boundary forms at the hydrogen left endpoint") {
  HamiltonianSystem sys = hydrogen_system({});
  NiessenProbe probe = hydrogen_left_probe();
  auto cls = classify_endpoint(probe);
  auto set = niessen_elements(probe, cls);

  // (i) the frame's own columns annihilate each other in the boundary form
  auto bf = boundary_form(probe, set.R, Vector(set.R.col(0)));
  CHECK_FALSE(bf.divergent);
  CHECK(bf.value.cwiseAbs().maxCoeff() <= 1e-6);

  // (ii) the complement produces the nonzero pairing constant
  auto bf2 = boundary_form(probe, set.R, Vector(set.complements.col(0)));
  const double kappa_expected =
      std::abs(2.0 * 1.0 *
               (set.nu_low[0] +
                std::conj(set.gamma[0]) * set.beta[0] * set.nu_high[0]));
  CHECK(std::abs(bf2.value(0)) ==
        doctest::Approx(kappa_expected).epsilon(1e-3));
  CHECK(std::abs(bf2.value(0)) > 1e-3);

  // zero input gives a zero form
  auto bf3 = boundary_form(probe, set.R, Vector(Vector::Zero(2)));
  CHECK(bf3.value.norm() <= 1e-14);
}

TEST_CASE("physical beta matches the published value") {
  HamiltonianSystem sys = hydrogen_system({});
  NiessenProbe probe = hydrogen_left_probe();
  auto cls = classify_endpoint(probe);
  Vector target(2);
  target << Complex(0.0), Complex(1.0);
  auto res = physical_beta(sys, -3.0, target, kEps, probe, cls);
  CHECK(res.beta.real() == doctest::Approx(-0.9494).epsilon(2e-3));
  CHECK(res.beta.imag() == doctest::Approx(2.4858).epsilon(2e-3));
  CHECK(res.residual <= 1e-6);
  CHECK(res.off_circle <= 0.05);

  // a target already in the selected subspace degenerates
  const Matrix phi_eps = probe.prop->phi(kEps);
  auto set = niessen_elements(probe, cls);
  Vector degenerate = phi_eps * set.R.col(0);
  CHECK_THROWS(physical_beta(sys, -3.0, degenerate, kEps, probe, cls));
}

TEST_CASE("lying frame at a constant-coefficient hyperbolic point") {
  // B = diag(-1, 1): y1'' = y1, decaying direction (1, -1)/sqrt(2)
  auto b0 = [](double) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return m;
  };
  auto b1 = [](double) { return Matrix(Matrix::Identity(2, 2)); };
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(2.0 * i);
  auto sys = build_linear_pencil(b0, b1, 0.0, kInf, {-0.5, 0.5}, xs);
  sys.b_kind = EndpointKind::Singular;

  FramePath right = lying_frame(sys, 0.0, EndSide::Right, std::monostate{},
                                25.0, 0.0, 0.0, 10.0);
  Matrix f = right.eval(3.0);
  Vector dir = f.col(0).normalized();
  const double align =
      std::abs(dir(0) * std::sqrt(0.5) - dir(1) * std::sqrt(0.5));
  CHECK(align == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("MHD left lying frame matches the Frobenius leading direction") {
  MhdParams p;
  HamiltonianSystem sys = mhd_system(p);
  FramePath left = lying_frame(sys, -1.1, EndSide::Left, std::monostate{},
                               1e-7, 0.01, 1e-5, 0.01);
  const Matrix f = left.eval(1e-4);
  // y2/y1 -> (mu0 rho0 lambda + F(0)^2) for m = -1
  CHECK((f(1, 0) / f(0, 0)).real() == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(is_lagrangian_frame(left.eval(0.005), 1e-8));
}

TEST_CASE("lying frame fails loudly without enough integrable paths") {
  // B_lambda with a sign flip violates the setting; engineered here by a
  // lambda placed against the degenerate band so only 0 paths stay finite.
  HamiltonianSystem sys = hydrogen_system({});
  // right endpoint with lambda above the admissible range: fake by asking
  // for the left side of a limit-point problem with an absurd probe
  MhdParams p;
  HamiltonianSystem mhd = mhd_system(p);
  // classification sees 1 finite path at the left; ask for n = 1 works, so
  // instead check the error path via an interior fake endpoint where both
  // paths diverge (probe at the singular point with the wrong side).
  CHECK_THROWS_AS(lying_frame(mhd, -1.05, EndSide::Left,
                              PhysicalVectorSpec{Vector::Ones(2), 1e-6}, 1e-7,
                              0.01, 1e-5, 0.005),
                  FrameConstructionError);
}
