#include "lqp/instance.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lqp/error.hpp"

namespace lqp {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

Matrix pinv_sym(const Matrix& A) {
  const EigenDecomposition ed = eig_sym(A);
  const double smax = ed.eigenvalues.size() == 0 ? 0.0 : ed.eigenvalues.cwiseAbs().maxCoeff();
  Vector inv(ed.eigenvalues.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    const double s = ed.eigenvalues(i);
    inv(i) = std::abs(s) > 1e-10 * smax && s != 0.0 ? 1.0 / s : 0.0;
  }
  return ed.eigenvectors * inv.asDiagonal() * ed.eigenvectors.transpose();
}

}  // namespace

double RawGame::cost(const Vector& x, const Vector& x_hat) const {
  Vector z(n + k);
  z << x, B * x_hat + b;
  return z.dot(M * z) + p.dot(z) + q;
}

double QuadraticForm::cost(const Vector& x, const Vector& x_hat) const {
  Vector z(2 * n);
  z << x, x_hat;
  const Vector d = z - l;
  return d.dot(Q * d) + r;
}

EllipsoidalHypothesis EllipsoidalHypothesis::from_matrix(const Matrix& C) {
  require(C.rows() == C.cols(), ErrorCode::InvalidMatrix, "hypothesis matrix must be square");
  require(C.allFinite(), ErrorCode::InvalidMatrix, "hypothesis matrix has non-finite entries");
  EllipsoidalHypothesis h;
  h.C = C;
  return h;
}

EllipsoidalHypothesis EllipsoidalHypothesis::scaled(const Matrix& C0, double epsilon) {
  EllipsoidalHypothesis h = from_matrix(epsilon * C0);
  h.epsilon = epsilon;
  h.C0 = C0;
  return h;
}

QuadraticForm decompose_nonneg(const RawGame& g) {
  const int n = g.n;
  const int k = g.k;
  require(n >= 1 && k >= 1, ErrorCode::InvalidMatrix, "dimensions must be positive");
  require(g.M.rows() == n + k && g.M.cols() == n + k, ErrorCode::InvalidMatrix, "M must be (n+k)x(n+k)");
  require(g.p.size() == n + k, ErrorCode::InvalidMatrix, "p must have length n+k");
  require(g.B.rows() == k && g.B.cols() == n, ErrorCode::InvalidMatrix, "B must be k x n");
  require(g.b.size() == k, ErrorCode::InvalidMatrix, "b must have length k");
  require(std::isfinite(g.q) && g.p.allFinite() && g.B.allFinite() && g.b.allFinite(),
          ErrorCode::InvalidMatrix, "non-finite game data");

  const Matrix M = symmetrize(g.M);
  const Matrix M11 = M.topLeftCorner(n, n);
  const Matrix M12 = M.topRightCorner(n, k);
  const Matrix M22 = M.bottomRightCorner(k, k);
  const Vector p1 = g.p.head(n);
  const Vector p2 = g.p.tail(k);

  QuadraticForm qf;
  qf.n = n;
  qf.Q.resize(2 * n, 2 * n);
  qf.Q.topLeftCorner(n, n) = M11;
  qf.Q.topRightCorner(n, n) = M12 * g.B;
  qf.Q.bottomLeftCorner(n, n) = (M12 * g.B).transpose();
  qf.Q.bottomRightCorner(n, n) = g.B.transpose() * M22 * g.B;
  qf.Q = symmetrize(qf.Q);

  Vector pp(2 * n);
  pp << p1 + 2.0 * M12 * g.b, g.B.transpose() * p2 + 2.0 * g.B.transpose() * M22 * g.b;
  const double qq = g.q + g.b.dot(M22 * g.b) + p2.dot(g.b);

  const EigenDecomposition ed = eig_sym(qf.Q);
  const double qnorm = ed.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * (1.0 + qnorm);
  require(ed.eigenvalues.minCoeff() >= -tol, ErrorCode::NotNonnegativeCost,
          "reduced quadratic part is not positive semidefinite");

  qf.l = -0.5 * pinv_sym(qf.Q) * pp;
  const double resid = (qf.Q * qf.l + 0.5 * pp).norm();
  require(resid <= 1e-8 * (1.0 + pp.norm()), ErrorCode::LinearTermOutsideRange,
          "linear term is not in the range of Q");

  const double lql = qf.l.dot(qf.Q * qf.l);
  qf.r = qq - lql;
  require(qf.r >= -1e-9 * (1.0 + std::abs(qq) + std::abs(lql)), ErrorCode::NotNonnegativeCost,
          "cost has a negative minimum");
  qf.r = std::max(qf.r, 0.0);
  return qf;
}

DerivedCoefficients derive_coefficients(const QuadraticForm& qf, const EllipsoidalHypothesis& h) {
  const int n = qf.n;
  require(qf.Q.rows() == 2 * n && qf.Q.cols() == 2 * n, ErrorCode::InvalidMatrix, "Q must be 2n x 2n");
  require(qf.l.size() == 2 * n, ErrorCode::InvalidMatrix, "l must have length 2n");
  require(h.C.rows() == n && h.C.cols() == n, ErrorCode::InvalidMatrix,
          "hypothesis dimension does not match the instance");

  const Matrix Q = symmetrize(qf.Q);
  const Matrix Q12 = Q.topRightCorner(n, n);
  const Matrix Q21 = Q.bottomLeftCorner(n, n);
  const Matrix Q22 = Q.bottomRightCorner(n, n);
  const Vector l1 = qf.l.head(n);
  const Vector l2 = qf.l.tail(n);
  const Matrix& C = h.C;

  DerivedCoefficients dc;
  dc.n = n;
  dc.D = symmetrize(Q12 + Q21 + Q22);
  dc.c = qf.r + qf.l.dot(Q * qf.l) + Q.topLeftCorner(n, n).trace();
  dc.Qm = symmetrize(C.transpose() * Q22 * C);
  const Matrix A = (Q12 + Q22) * C;
  dc.E = symmetrize(4.0 * A * A.transpose());
  dc.f = 4.0 * (C.transpose() * (Q21 * l1 + Q22 * l2)).squaredNorm();

  const EigenDecomposition qm = eig_sym(dc.Qm);
  dc.lambda_bar = std::max(qm.eigenvalues(0), 0.0);
  dc.lambda_bar_2 = n >= 2 ? qm.eigenvalues(1) : dc.lambda_bar;

  const NegProjections pd = neg_projections(dc.D);
  dc.t_bar = (dc.E * pd.lt).trace();
  return dc;
}

DerivedCoefficients scale_coefficients(const DerivedCoefficients& dc, double s) {
  const double s2 = s * s;
  DerivedCoefficients out = dc;
  out.E = s2 * dc.E;
  out.Qm = s2 * dc.Qm;
  out.f = s2 * dc.f;
  out.lambda_bar = s2 * dc.lambda_bar;
  out.lambda_bar_2 = s2 * dc.lambda_bar_2;
  out.t_bar = s2 * dc.t_bar;
  return out;
}

EllipsoidalHypothesis hypothesis_wasserstein(double epsilon, int n) {
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorCode::InvalidRadius, "epsilon must be >= 0");
  require(n >= 1, ErrorCode::InvalidParameter, "n must be positive");
  return EllipsoidalHypothesis::scaled(Matrix::Identity(n, n), epsilon);
}

EllipsoidalHypothesis hypothesis_costly_update(const Matrix& R, double epsilon) {
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorCode::InvalidRadius, "epsilon must be >= 0");
  require(R.rows() == R.cols() && R.rows() % 2 == 0 && R.rows() >= 2, ErrorCode::InvalidMatrix,
          "R must be 2n x 2n");
  const Matrix Rs = symmetrize(R);
  const Eigen::Index n = Rs.rows() / 2;
  const Matrix R21 = Rs.bottomLeftCorner(n, n);
  const Matrix R22 = Rs.bottomRightCorner(n, n);

  const EigenDecomposition e22 = eig_sym(R22);
  const double tol22 = 1e-12 * (1.0 + e22.eigenvalues.cwiseAbs().maxCoeff());
  require(e22.eigenvalues.minCoeff() > tol22, ErrorCode::NotPD, "R22 must be positive definite");

  Eigen::JacobiSVD<Matrix> svd(R21);
  const Vector sv = svd.singularValues();
  require(sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) < 1e12, ErrorCode::SingularCrossTerm,
          "R21 is singular");

  const Matrix C0 = R21.fullPivLu().solve(sqrt_psd(R22));
  EllipsoidalHypothesis h = EllipsoidalHypothesis::from_matrix(std::sqrt(epsilon) * C0);
  h.epsilon = std::sqrt(epsilon);
  h.C0 = C0;
  return h;
}

EllipsoidalHypothesis hypothesis_mismatched_prior(double epsilon, double trace_sigma_bound, int n) {
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorCode::InvalidRadius, "epsilon must be >= 0");
  require(std::isfinite(trace_sigma_bound) && trace_sigma_bound >= 0.0, ErrorCode::InvalidRadius,
          "trace bound must be >= 0");
  require(n >= 1, ErrorCode::InvalidParameter, "n must be positive");
  const double radius = std::sqrt(2.0 * epsilon + epsilon * epsilon) * std::sqrt(trace_sigma_bound);
  return EllipsoidalHypothesis::scaled(Matrix::Identity(n, n), radius);
}

EllipsoidalHypothesis hypothesis_affine_distortion(double chi, double epsilon, int n) {
  require(std::isfinite(chi) && chi >= 0.0 && chi <= 1.0, ErrorCode::InvalidParameter,
          "chi must lie in [0, 1]");
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorCode::InvalidParameter, "epsilon must be >= 0");
  require(n >= 1, ErrorCode::InvalidParameter, "n must be positive");
  EllipsoidalHypothesis h = EllipsoidalHypothesis::scaled(Matrix::Identity(n, n), (1.0 - chi) * epsilon);
  h.center_shifted = chi < 1.0;
  return h;
}

double gamma_half_ratio(double x) {
  require(x > 0.0, ErrorCode::InvalidParameter, "gamma ratio needs x > 0");
  if (x < 100.0) return std::tgamma(x + 0.5) / std::tgamma(x);
  // Asymptotic expansion of Gamma(x + 1/2) / Gamma(x).
  const double u = 1.0 / x;
  const double series =
      1.0 - u / 8.0 + u * u / 128.0 + 5.0 * u * u * u / 1024.0 - 21.0 * u * u * u * u / 32768.0;
  return std::sqrt(x) * series;
}

double gaussian_mean_norm(int n) {
  return std::numbers::sqrt2 * gamma_half_ratio(0.5 * n);
}

PriorStats prior_stats(const PriorSpec& prior) {
  require(prior.n >= 1, ErrorCode::InvalidParameter, "prior dimension must be positive");
  PriorStats st;
  if (prior.family == PriorFamily::Gaussian) {
    st.E_norm_x = gaussian_mean_norm(prior.n);
    st.E_abs_x1 = std::sqrt(2.0 / std::numbers::pi);
  } else {
    st.E_norm_x = std::sqrt(static_cast<double>(prior.n));
    // n = 1: x1 = +-1.
    st.E_abs_x1 = prior.n == 1 ? 1.0
                               : st.E_norm_x / (std::sqrt(std::numbers::pi) * gamma_half_ratio(0.5 * prior.n));
  }
  const double a2 = st.E_abs_x1 * st.E_abs_x1;
  st.kappa = st.E_abs_x1 / std::sqrt(1.0 + a2);
  st.beta_bar = st.E_abs_x1 * std::sqrt(1.0 + a2) / (1.0 + 2.0 * a2);
  // 1 + 1 / (1 + kappa^2) in terms of a = E|x1|.
  st.gamma_bar = (2.0 + 3.0 * a2) / (1.0 + 2.0 * a2);
  return st;
}

double upsilon(int n) {
  require(n >= 1, ErrorCode::InvalidParameter, "n must be positive");
  return prior_stats({PriorFamily::Sphere, n}).gamma_bar;
}

double upsilon_limit() { return 2.0 * (3.0 + std::numbers::pi) / (4.0 + std::numbers::pi); }

}  // namespace lqp
