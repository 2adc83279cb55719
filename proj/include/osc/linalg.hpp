#pragma once

// Small dense complex linear algebra for 2n x n Lagrangian frames and
// 2n x 2n symplectic / Hermitian matrices.  Everything here is sized for
// n <= ~8; no attempt is made at large-scale efficiency.

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>

namespace osc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard symplectic matrix J = [[0, -I],[I, 0]] of size 2n x 2n.
Matrix symplectic_j(int n);

// J*M without forming J.
Matrix apply_j(const Matrix& m);

struct NonHermitianError : std::runtime_error {
  double defect;
  explicit NonHermitianError(double d)
      : std::runtime_error("matrix is not Hermitian within tolerance"),
        defect(d) {}
};

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns, phase-fixed
};

// Eigen-decomposition of a Hermitian matrix.  Values ascending; each
// eigenvector's largest-modulus entry is made real-positive so that paths of
// eigenvectors can be compared across nearby matrices.
HermitianEigen hermitian_eigen(const Matrix& m, double sym_tol = 1e-8);

// Rank by singular-value threshold tol * sigma_max.
int numeric_rank(const Matrix& m, double tol = 1e-9);

// True iff f (2n x n) has full column rank and f* J f ~ 0.
bool is_lagrangian_frame(const Matrix& f, double tol = 1e-9);

// Spectral-norm distance between the orthogonal projections onto the column
// spans of two frames.  Throws on rank-deficient input.
double projection_distance(const Matrix& f1, const Matrix& f2);

// Orthonormalize the columns of a frame (thin QR); preserves the span.
Matrix orthonormalize_columns(const Matrix& f);

// Largest |entry| of m.
double max_abs(const Matrix& m);

}  // namespace osc
