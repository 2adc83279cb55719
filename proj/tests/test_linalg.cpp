#include <doctest.h>

#include <random>

#include "osc/linalg.hpp"

using namespace osc;

namespace {

std::mt19937 rng(1234);

Matrix random_complex(int r, int c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

Matrix random_hermitian(int n) {
  Matrix a = random_complex(n, n);
  return 0.5 * (a + a.adjoint());
}

Matrix random_lagrangian_frame(int n) {
  // span{(I; S)} with S Hermitian is Lagrangian
  Matrix s = random_hermitian(n);
  Matrix f(2 * n, n);
  f.topRows(n) = Matrix::Identity(n, n);
  f.bottomRows(n) = s;
  return f;
}

}  // namespace

TEST_CASE("hermitian_eigen on diagonal and exchange matrices") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -1.0;
  auto e = hermitian_eigen(d);
  CHECK(e.values(0) == doctest::Approx(-1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));

  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  auto ex = hermitian_eigen(x);
  CHECK(ex.values(0) == doctest::Approx(-1.0));
  CHECK(ex.values(1) == doctest::Approx(1.0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(ex.vectors(0, 0).real() + ex.vectors(1, 0).real()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ex.vectors(0, 1).real() == doctest::Approx(s));
  CHECK(ex.vectors(1, 1).real() == doctest::Approx(s));
}

TEST_CASE("hermitian_eigen reconstruction oracle and unitarity") {
  for (int rep = 0; rep < 5; ++rep) {
    Matrix h = random_hermitian(4);
    auto e = hermitian_eigen(h);
    Matrix rec = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k)
      rec += e.values(k) * (e.vectors.col(k) * e.vectors.col(k).adjoint());
    CHECK((rec - h).norm() <= 1e-10 * h.norm());
    CHECK((e.vectors.adjoint() * e.vectors - Matrix::Identity(4, 4)).norm() <=
          1e-10);
    for (int k = 0; k + 1 < 4; ++k) CHECK(e.values(k) <= e.values(k + 1));
    // phase convention: largest entry real positive
    for (int k = 0; k < 4; ++k) {
      Eigen::Index imax;
      e.vectors.col(k).cwiseAbs().maxCoeff(&imax);
      CHECK(e.vectors(imax, k).imag() == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(e.vectors(imax, k).real() > 0.0);
    }
  }
}

TEST_CASE("hermitian_eigen rejects non-Hermitian input") {
  Matrix m(2, 2);
  m << Complex(0.0), Complex(1.0), Complex(0.0), Complex(0.0);
  CHECK_THROWS_AS(hermitian_eigen(m), NonHermitianError);
  try {
    hermitian_eigen(m);
  } catch (const NonHermitianError& e) {
    CHECK(e.defect > 0.5);
  }
}

TEST_CASE("is_lagrangian_frame basics") {
  Matrix f(2, 1);
  f << Complex(1.0), Complex(0.0);
  CHECK(is_lagrangian_frame(f));

  Matrix g(4, 2);
  g.topRows(2) = Matrix::Identity(2, 2);
  g.bottomRows(2) = Matrix::Identity(2, 2);
  CHECK(is_lagrangian_frame(g));

  // n = 1, (1; i): (1, -i) J (1, i)^T = -2i != 0
  Matrix bad(2, 1);
  bad << Complex(1.0), Complex(0.0, 1.0);
  CHECK_FALSE(is_lagrangian_frame(bad));
}

TEST_CASE("frame right-multiplication invariance") {
  for (int n : {1, 2, 3}) {
    Matrix f = random_lagrangian_frame(n);
    REQUIRE(is_lagrangian_frame(f));
    Matrix g = random_complex(n, n);
    while (std::abs(g.determinant()) < 0.1) g = random_complex(n, n);
    CHECK(is_lagrangian_frame(Matrix(f * g)));
    CHECK(projection_distance(f, Matrix(f * g)) <= 1e-10);
  }
}

TEST_CASE("projection_distance examples") {
  Matrix f = random_lagrangian_frame(2);
  CHECK(projection_distance(f, f) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix e1(2, 1), e2(2, 1);
  e1 << Complex(1.0), Complex(0.0);
  e2 << Complex(0.0), Complex(1.0);
  CHECK(projection_distance(e1, e2) == doctest::Approx(1.0));

  Matrix rank_def(4, 2);
  rank_def.setZero();
  rank_def(0, 0) = 1.0;
  rank_def(0, 1) = 1.0;
  CHECK_THROWS(projection_distance(rank_def, random_lagrangian_frame(2)));
}
