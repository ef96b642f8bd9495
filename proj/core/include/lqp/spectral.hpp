#pragma once

#include <Eigen/Dense>

namespace lqp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenpairs of a symmetric matrix, eigenvalues sorted in descending order.
/// Each eigenvector has its largest-magnitude component nonnegative.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

struct NegProjections {
  Matrix lt;  // projection onto eigenvalues < -zero_tol
  Matrix le;  // projection onto eigenvalues <= zero_tol
};

/// Returns (A + A^T) / 2. Throws InvalidMatrix for non-square or non-finite input.
Matrix symmetrize(const Matrix& A);

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm(const Matrix& A);

/// Default zero-classification band 1e-9 * (1 + ||A||_2).
double default_zero_tol(const Matrix& A);

EigenDecomposition eig_sym(const Matrix& A);

/// Pass zero_tol < 0 to use default_zero_tol(A).
NegProjections neg_projections(const Matrix& A, double zero_tol = -1.0);
NegProjections neg_projections(const EigenDecomposition& ed, double zero_tol);

/// Projection onto eigenvector columns [first, first + count) of ed.
Matrix projection_from(const EigenDecomposition& ed, Eigen::Index first, Eigen::Index count);

/// PSD square root. Eigenvalues in [-tol, 0) are clipped; below -tol throws NotPSD.
/// Pass tol < 0 to use default_zero_tol(A).
Matrix sqrt_psd(const Matrix& A, double tol = -1.0);

/// Number of eigenvalues strictly above `threshold`.
int count_above(const Matrix& A, double threshold);

}  // namespace lqp
