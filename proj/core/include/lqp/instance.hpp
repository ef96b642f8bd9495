#pragma once

#include <optional>

#include "lqp/spectral.hpp"

namespace lqp {

/// Cost v(a, x) = [x; a]^T M [x; a] + p^T [x; a] + q, with receiver action a = B x_hat + b.
struct RawGame {
  int n = 0;
  int k = 0;
  Matrix M;  // (n+k) x (n+k)
  Vector p;  // n+k
  double q = 0.0;
  Matrix B;  // k x n
  Vector b;  // k

  /// Cost when the state is x and the receiver's estimate is x_hat.
  double cost(const Vector& x, const Vector& x_hat) const;
};

/// Nonnegative reduced form (z - l)^T Q (z - l) + r with z = [x; x_hat].
struct QuadraticForm {
  int n = 0;
  Matrix Q;  // 2n x 2n, PSD
  Vector l;  // 2n
  double r = 0.0;

  double cost(const Vector& x, const Vector& x_hat) const;
  Matrix Q11() const { return Q.topLeftCorner(n, n); }
  Matrix Q12() const { return Q.topRightCorner(n, n); }
  Matrix Q21() const { return Q.bottomLeftCorner(n, n); }
  Matrix Q22() const { return Q.bottomRightCorner(n, n); }
  Vector l1() const { return l.head(n); }
  Vector l2() const { return l.tail(n); }
};

/// Credible-mean ball mu_bar + C * B. When built from a scale, C = epsilon * C0.
struct EllipsoidalHypothesis {
  Matrix C;
  std::optional<double> epsilon;
  std::optional<Matrix> C0;
  // Set by the affine-distortion builder: the true ball is centered away from mu_bar.
  bool center_shifted = false;

  static EllipsoidalHypothesis from_matrix(const Matrix& C);
  static EllipsoidalHypothesis scaled(const Matrix& C0, double epsilon);
};

struct DerivedCoefficients {
  int n = 0;
  Matrix D;
  Matrix E;
  Matrix Qm;  // C^T Q22 C
  double f = 0.0;
  double c = 0.0;
  double lambda_bar = 0.0;
  double lambda_bar_2 = 0.0;
  double t_bar = 0.0;
};

enum class PriorFamily { Gaussian, Sphere };

struct PriorSpec {
  PriorFamily family = PriorFamily::Gaussian;
  int n = 1;
};

struct PriorStats {
  double E_abs_x1 = 0.0;
  double E_norm_x = 0.0;
  double kappa = 0.0;
  double beta_bar = 0.0;
  double gamma_bar = 0.0;
};

QuadraticForm decompose_nonneg(const RawGame& g);

DerivedCoefficients derive_coefficients(const QuadraticForm& qf, const EllipsoidalHypothesis& h);

/// Coefficients for the hypothesis s * C given those for C.
DerivedCoefficients scale_coefficients(const DerivedCoefficients& dc, double s);

EllipsoidalHypothesis hypothesis_wasserstein(double epsilon, int n);
/// R is the 2n x 2n quadratic part of the receiver's loss in [x; a].
EllipsoidalHypothesis hypothesis_costly_update(const Matrix& R, double epsilon);
EllipsoidalHypothesis hypothesis_mismatched_prior(double epsilon, double trace_sigma_bound, int n);
EllipsoidalHypothesis hypothesis_affine_distortion(double chi, double epsilon, int n);

/// Gamma(x + 1/2) / Gamma(x) for x > 0.
double gamma_half_ratio(double x);

/// E||x|| for x ~ N(0, I_n).
double gaussian_mean_norm(int n);

PriorStats prior_stats(const PriorSpec& prior);

double upsilon(int n);

/// Limit of upsilon(n): 2(3 + pi) / (4 + pi).
double upsilon_limit();

}  // namespace lqp
