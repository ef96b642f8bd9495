#pragma once

#include <utility>

#include "lqp/spectral.hpp"

namespace lqp {

/// max over the unit ball of 2 v^T eta + eta^T Qm eta.
struct InnerMaxProblem {
  Matrix Qm;
  Vector v;
};

/// Exact value via the secular equation in the eigenbasis of Qm.
double worst_case_penalty(const InnerMaxProblem& p, double tol = 1e-12);

/// Same as above with a precomputed decomposition of Qm (w = V^T v).
double worst_case_penalty_eig(const EigenDecomposition& qm, const Vector& w, double tol = 1e-12);

/// (lower, upper) = ((1 - beta^2) lambda_max + 2 beta ||v||, lambda_max + 2 ||v||).
std::pair<double, double> penalty_bounds(const InnerMaxProblem& p, double beta);

/// Piecewise ratio gamma(beta) for a prior constant kappa; infinite at beta = 1.
double gamma_fn(double beta, double kappa);

}  // namespace lqp
