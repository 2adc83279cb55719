#include "osc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace osc {

Matrix symplectic_j(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return j;
}

Matrix apply_j(const Matrix& m) {
  const int n = static_cast<int>(m.rows()) / 2;
  Matrix out(m.rows(), m.cols());
  out.topRows(n) = -m.bottomRows(n);
  out.bottomRows(n) = m.topRows(n);
  return out;
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const Matrix& m, double sym_tol) {
  const double scale = m.norm();
  const double defect = (m - m.adjoint()).norm();
  if (defect > sym_tol * std::max(scale, 1e-300)) throw NonHermitianError(defect);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigendecomposition failed");

  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
  // Phase convention: largest-modulus entry real-positive.
  for (int k = 0; k < out.vectors.cols(); ++k) {
    Eigen::Index imax;
    out.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = out.vectors(imax, k);
    if (std::abs(pivot) > 0.0) out.vectors.col(k) *= std::abs(pivot) / pivot;
  }
  return out;
}

int numeric_rank(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++r;
  return r;
}

bool is_lagrangian_frame(const Matrix& f, double tol) {
  if (f.rows() != 2 * f.cols() || f.cols() == 0) return false;
  const int n = static_cast<int>(f.cols());
  if (numeric_rank(f, tol) != n) return false;
  const double defect = (f.adjoint() * apply_j(f)).norm();
  return defect <= tol * std::max(f.squaredNorm(), 1e-300);
}

double projection_distance(const Matrix& f1, const Matrix& f2) {
  auto projector = [](const Matrix& f) {
    if (numeric_rank(f) != f.cols())
      throw std::runtime_error("projection_distance: rank-deficient frame");
    Matrix q = orthonormalize_columns(f);
    return Matrix(q * q.adjoint());
  };
  Matrix diff = projector(f1) - projector(f2);
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Matrix orthonormalize_columns(const Matrix& f) {
  Eigen::HouseholderQR<Matrix> qr(f);
  Matrix q = qr.householderQ() * Matrix::Identity(f.rows(), f.cols());
  return q;
}

}  // namespace osc
