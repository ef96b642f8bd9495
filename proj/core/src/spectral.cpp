#include "lqp/spectral.hpp"

#include <cmath>

#include "lqp/error.hpp"

namespace lqp {

Matrix symmetrize(const Matrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::InvalidMatrix, "matrix is not square");
  if (!A.allFinite()) throw Error(ErrorCode::InvalidMatrix, "matrix has non-finite entries");
  return 0.5 * (A + A.transpose());
}

EigenDecomposition eig_sym(const Matrix& A) {
  const Matrix S = symmetrize(A);
  const Eigen::Index n = S.rows();
  EigenDecomposition ed;
  if (n == 0) {
    ed.eigenvalues.resize(0);
    ed.eigenvectors.resize(0, 0);
    return ed;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidMatrix, "eigendecomposition failed");
  }
  ed.eigenvalues = solver.eigenvalues().reverse();
  ed.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index imax = 0;
    ed.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (ed.eigenvectors(imax, j) < 0.0) ed.eigenvectors.col(j) *= -1.0;
  }
  return ed;
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  const EigenDecomposition ed = eig_sym(A);
  return std::max(std::abs(ed.eigenvalues(0)), std::abs(ed.eigenvalues(ed.eigenvalues.size() - 1)));
}

double default_zero_tol(const Matrix& A) { return 1e-9 * (1.0 + spectral_norm(A)); }

Matrix projection_from(const EigenDecomposition& ed, Eigen::Index first, Eigen::Index count) {
  const Eigen::Index n = ed.eigenvectors.rows();
  if (count <= 0) return Matrix::Zero(n, n);
  const auto V = ed.eigenvectors.middleCols(first, count);
  return V * V.transpose();
}

NegProjections neg_projections(const EigenDecomposition& ed, double zero_tol) {
  const Eigen::Index n = ed.eigenvalues.size();
  // Descending order: negative eigenvalues occupy a trailing block.
  Eigen::Index n_lt = 0;
  Eigen::Index n_le = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ed.eigenvalues(i) < -zero_tol) ++n_lt;
    if (ed.eigenvalues(i) <= zero_tol) ++n_le;
  }
  return {projection_from(ed, n - n_lt, n_lt), projection_from(ed, n - n_le, n_le)};
}

NegProjections neg_projections(const Matrix& A, double zero_tol) {
  const EigenDecomposition ed = eig_sym(A);
  if (zero_tol < 0.0) {
    const double nrm = ed.eigenvalues.size() == 0
                           ? 0.0
                           : ed.eigenvalues.cwiseAbs().maxCoeff();
    zero_tol = 1e-9 * (1.0 + nrm);
  }
  return neg_projections(ed, zero_tol);
}

Matrix sqrt_psd(const Matrix& A, double tol) {
  const EigenDecomposition ed = eig_sym(A);
  if (tol < 0.0) {
    const double nrm = ed.eigenvalues.size() == 0 ? 0.0 : ed.eigenvalues.cwiseAbs().maxCoeff();
    tol = 1e-9 * (1.0 + nrm);
  }
  Vector s(ed.eigenvalues.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double lam = ed.eigenvalues(i);
    if (lam < -tol) throw Error(ErrorCode::NotPSD, "matrix has a negative eigenvalue");
    s(i) = std::sqrt(std::max(lam, 0.0));
  }
  const Matrix S = ed.eigenvectors * s.asDiagonal() * ed.eigenvectors.transpose();
  return 0.5 * (S + S.transpose());
}

int count_above(const Matrix& A, double threshold) {
  if (A.size() == 0) return 0;
  const EigenDecomposition ed = eig_sym(A);
  int count = 0;
  for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
    if (ed.eigenvalues(i) > threshold) ++count;
  }
  return count;
}

}  // namespace lqp
