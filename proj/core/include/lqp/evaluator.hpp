#pragma once

#include <cstdint>
#include <vector>

#include "lqp/instance.hpp"

namespace lqp {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

struct ThresholdTriple {
  double eps_minus = 0.0;
  double eps_star = 0.0;
  double eps_plus = 0.0;
};

struct OpeningThresholds {
  ThresholdTriple triple;
  double ratio_plus_minus = 0.0;  // eps_plus / eps_minus = 1 / (beta_bar kappa)
};

/// Objective values of the opening example (cost ||x_hat - k x||^2, C = eps I, Gaussian prior)
/// at no information (Sigma = 0) and full information (Sigma = I).
struct OpeningTableRow {
  double epsilon = 0.0;
  double abp_ni = 0.0;
  double abp_fi = 0.0;
  double pp_ni = 0.0;
  double pp_fi = 0.0;
  double pop_ni = 0.0;
  double pop_fi = 0.0;
};

/// Tr(D P) + c plus a Monte Carlo estimate of the worst-case penalty under the policy mu = P x.
/// Results do not depend on `workers`.
McEstimate mc_true_cost(const QuadraticForm& qf, const EllipsoidalHypothesis& h,
                        const PriorSpec& prior, const Matrix& P, long n_samples,
                        std::uint64_t seed, int workers = 1);

/// Order-independent pairwise sum.
double pairwise_sum(const double* x, std::size_t n);

ThresholdTriple thresholds_1d(double k);
OpeningThresholds opening_thresholds(double k, int n);
OpeningTableRow opening_table_row(double k, int n, double eps);

double opening_linear_best(double k, int n, double eps);

/// Smallest useful radius 2 eps |1 - k| / (2k - 1).
double radius_threshold_star(double k, double eps);

/// Cost of revealing x when ||x|| >= R and nothing otherwise, Gaussian prior.
double radius_threshold_cost(double k, int n, double eps, double R, int quad_depth = 15);

struct RadiusPoint {
  double R = 0.0;
  double cost = 0.0;
};

/// Evaluates radius_threshold_cost on `steps` evenly spaced radii in [R_lo, R_hi].
std::vector<RadiusPoint> radius_scan(double k, int n, double eps, double R_lo, double R_hi,
                                     int steps);

}  // namespace lqp
