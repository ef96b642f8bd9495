#include "lqp/innermax.hpp"

#include <cmath>
#include <limits>

#include "lqp/error.hpp"

namespace lqp {

double worst_case_penalty_eig(const EigenDecomposition& qm, const Vector& w, double tol) {
  const Eigen::Index n = w.size();
  if (n == 0) return 0.0;
  const Vector& lam = qm.eigenvalues;
  const double lmax = lam(0);
  const double scale = 1.0 + std::abs(lmax) + std::abs(lam(n - 1));
  const double band = 1e-12 * scale;

  const double vnorm2 = w.squaredNorm();
  if (vnorm2 == 0.0) return lmax;
  const double vnorm = std::sqrt(vnorm2);

  bool scaled_identity = true;
  double w_top = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lmax - lam(i) <= band) {
      w_top += w(i) * w(i);
    } else {
      scaled_identity = false;
    }
  }
  if (scaled_identity) return lmax + 2.0 * vnorm;

  // d = lambda - lmax > 0; F(d) = lmax + d + sum w_i^2 / (d + gap_i).
  auto gap = [&](Eigen::Index i) { return lmax - lam(i) <= band ? 0.0 : lmax - lam(i); };
  auto dF = [&](double d) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) == 0.0) continue;
      const double den = d + gap(i);
      s += w(i) * w(i) / (den * den);
    }
    return 1.0 - s;
  };
  auto F = [&](double d) {
    double s = lmax + d;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) != 0.0) s += w(i) * w(i) / (d + gap(i));
    }
    return s;
  };

  if (w_top == 0.0 && dF(0.0) >= 0.0) return F(0.0);

  double lo = 0.0;
  double hi = vnorm;
  if (dF(hi) < 0.0) hi *= 1.0 + 1e-12;
  double d = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double g = dF(d);
    if (g < 0.0) lo = d; else hi = d;
    if (hi - lo <= tol * (1.0 + hi) || g == 0.0) return F(d);
    // Newton step on F', safeguarded by the bracket.
    double s3 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w(i) == 0.0) continue;
      const double den = d + gap(i);
      s3 += w(i) * w(i) / (den * den * den);
    }
    double next = d - g / (2.0 * s3);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - d) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + d)) return F(next);
    d = next;
  }
  throw Error(ErrorCode::NumericalFailure, "inner maximization did not converge");
}

double worst_case_penalty(const InnerMaxProblem& p, double tol) {
  if (p.Qm.rows() != p.v.size()) throw Error(ErrorCode::InvalidMatrix, "Qm and v dimensions differ");
  const EigenDecomposition ed = eig_sym(p.Qm);
  const double scale = 1.0 + (ed.eigenvalues.size() ? ed.eigenvalues.cwiseAbs().maxCoeff() : 0.0);
  if (ed.eigenvalues.size() && ed.eigenvalues.minCoeff() < -1e-9 * scale) {
    throw Error(ErrorCode::NotPSD, "Qm must be positive semidefinite");
  }
  return worst_case_penalty_eig(ed, ed.eigenvectors.transpose() * p.v, tol);
}

std::pair<double, double> penalty_bounds(const InnerMaxProblem& p, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::InvalidParameter, "beta must lie in [0, 1]");
  const double lmax = p.Qm.size() ? eig_sym(p.Qm).eigenvalues(0) : 0.0;
  const double vn = p.v.norm();
  return {(1.0 - beta * beta) * lmax + 2.0 * beta * vn, lmax + 2.0 * vn};
}

double gamma_fn(double beta, double kappa) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::InvalidParameter, "beta must lie in [0, 1]");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw Error(ErrorCode::InvalidParameter, "kappa must lie in [0, 1]");
  if (beta == 1.0) return std::numeric_limits<double>::infinity();
  const double b2 = beta * beta;
  if (1.0 - b2 - beta * kappa > 0.0) {
    return (2.0 - b2 - 2.0 * beta * kappa) / (1.0 - b2 * (1.0 + kappa * kappa));
  }
  return 1.0 / (1.0 - b2);
}

}  // namespace lqp
