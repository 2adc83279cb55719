#include <doctest.h>

#include <random>

#include "osc/problems.hpp"
#include "osc/propagator.hpp"

using namespace osc;

namespace {

std::mt19937 rng(77);

// Random linear pencil with real-symmetric coefficients on [0, 1].
HamiltonianSystem random_pencil(int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a0(2 * n, 2 * n), a1(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      a0(i, j) = g(rng);
      a1(i, j) = g(rng);
    }
  Eigen::MatrixXd b0 = 0.5 * (a0 + a0.transpose());
  Eigen::MatrixXd b1 = a1 * a1.transpose() +
                       0.1 * Eigen::MatrixXd::Identity(2 * n, 2 * n);
  auto b0f = [b0](double x) {
    return Matrix((1.0 + 0.3 * std::sin(2 * x)) * b0.cast<Complex>());
  };
  auto b1f = [b1](double x) {
    return Matrix((1.0 + 0.2 * std::cos(x)) * b1.cast<Complex>());
  };
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(i / 10.0);
  return build_linear_pencil(b0f, b1f, 0.0, 1.0, {-2.0, 2.0}, xs);
}

}  // namespace

TEST_CASE("constant-coefficient rotation: Phi(c + pi/2) = -J") {
  HamiltonianSystem sys;
  sys.n = 1;
  sys.a = -10;
  sys.b = 10;
  sys.B = [](double, double) { return Matrix(Matrix::Identity(2, 2)); };
  sys.B_lambda = [](double, double) { return Matrix(Matrix::Zero(2, 2)); };
  const double c = 0.3;
  auto path = fundamental_matrix(sys, 0.0, 0.0, c,
                                 {c + 3.14159265358979323846 / 2.0});
  const Matrix expect = -symplectic_j(1);
  CHECK((path.samples[0].phi - expect).norm() <= 1e-9);
}

TEST_CASE("symplectic identity monitored along random pencils") {
  for (int rep = 0; rep < 3; ++rep) {
    HamiltonianSystem sys = random_pencil(1 + rep % 2);
    std::vector<double> targets{0.1, 0.35, 0.7, 0.95};
    auto path = fundamental_matrix(sys, Complex(0, 1), 0.5, 0.0, targets);
    CHECK(path.sympl_defect_max <= 1e-8);
  }
}

TEST_CASE("reversibility: integrate out and back") {
  HamiltonianSystem sys = random_pencil(2);
  IntegratorConfig cfg;
  const int d = sys.dim();
  auto rhs = [&](double x, const Vector& s) -> Vector {
    Matrix phi = Eigen::Map<const Matrix>(s.data(), d, d);
    Matrix dphi = -apply_j(sys.B(x, 0.7) * phi);
    return Eigen::Map<const Vector>(dphi.data(), d * d);
  };
  Matrix id = Matrix::Identity(d, d);
  Vector y0 = Eigen::Map<const Vector>(id.data(), d * d);
  DensePath fwd = integrate_dense(rhs, y0, 0.0, 1.0, cfg);
  Vector mid = fwd.eval(1.0);
  DensePath back = integrate_dense(rhs, mid, 1.0, 0.0, cfg);
  Matrix round = Eigen::Map<const Matrix>(back.eval(0.0).data(), d, d);
  CHECK((round - id).norm() <= 1e-7);
}

TEST_CASE("dense output matches direct integration at interior points") {
  HamiltonianSystem sys = random_pencil(1);
  ProbePath p = integrate_probe(sys, 0.0, 0.3, 0.0, 1.0, {});
  for (double x : {0.237, 0.52, 0.881}) {
    ProbePath direct = integrate_probe(sys, 0.0, 0.3, 0.0, x, {});
    CHECK((p.phi(x) - direct.phi(x)).norm() <= 1e-8);
    CHECK((p.weight(x) - direct.weight(x)).norm() <=
          1e-8 * (1.0 + p.weight(x).norm()));
  }
}

TEST_CASE("frame of zero system stays constant") {
  HamiltonianSystem sys;
  sys.n = 1;
  sys.a = -5;
  sys.b = 5;
  sys.B = [](double, double) { return Matrix(Matrix::Zero(2, 2)); };
  sys.B_lambda = [](double, double) { return Matrix(Matrix::Zero(2, 2)); };
  Matrix f0(2, 1);
  f0 << Complex(0.6), Complex(0.8);
  FramePath path = evolve_frame(sys, 0.0, f0, 0.0, -2.0, 2.0);
  CHECK((path.eval(-1.7) - f0).norm() <= 1e-10);
  CHECK((path.eval(1.3) - f0).norm() <= 1e-10);
}

TEST_CASE("Lagrangian property preserved along the hydrogen run") {
  HamiltonianSystem sys = hydrogen_system({});
  Matrix f0(2, 1);
  f0 << Complex(0.0), Complex(1.0);
  FramePath path = evolve_frame(sys, -3.0, f0, 1e-10, 1e-10, 10.0);
  for (double x : {1e-8, 1e-4, 0.1, 1.0, 5.0, 10.0})
    CHECK(is_lagrangian_frame(path.eval(x), 1e-8));
}

TEST_CASE("frame evolution consistent with the fundamental matrix") {
  for (int rep = 0; rep < 3; ++rep) {
    HamiltonianSystem sys = random_pencil(1 + rep % 2);
    const int n = sys.n;
    std::normal_distribution<double> g;
    Matrix s = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        s(i, j) = g(rng);
        s(j, i) = std::conj(s(i, j));
      }
    Matrix f0(2 * n, n);
    f0.topRows(n) = Matrix::Identity(n, n);
    f0.bottomRows(n) = s;

    FramePath fp = evolve_frame(sys, 0.4, f0, 0.0, 0.0, 1.0);
    ProbePath phi = integrate_probe(sys, 0.0, 0.4, 0.0, 1.0, {});
    for (double x : {0.33, 0.8}) {
      CHECK(projection_distance(fp.eval(x), Matrix(phi.phi(x) * f0)) <= 1e-7);
    }
  }
}

TEST_CASE("regular boundary frame satisfies the kernel relation") {
  // X(a) = J alpha* gives alpha X(a) = alpha J alpha* = 0.
  Matrix al(1, 2);
  al << Complex(0.3, 0.0), Complex(-1.0, 0.0);
  Matrix f = apply_j(al.adjoint());
  CHECK((al * f).norm() <= 1e-14);
}

TEST_CASE("probe matrices at the base point") {
  HamiltonianSystem sys = random_pencil(1);
  // imaginary-shift probe at the base: (1/(2 Im mu)) J/i has eigenvalues
  // -+ 1/(2 Im mu); the weight integral is zero there.
  ProbePath p = integrate_probe(sys, Complex(0, 2), 0.0, 0.5, 1.0, {});
  CHECK(p.weight(0.5).norm() <= 1e-12);
  Matrix a0 = (symplectic_j(1) / Complex(0, 1)) / 4.0 + p.weight(0.5);
  auto e = hermitian_eigen(a0);
  CHECK(e.values(0) == doctest::Approx(-0.25));
  CHECK(e.values(1) == doctest::Approx(0.25));
}
