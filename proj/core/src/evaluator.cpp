#include "lqp/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lqp/error.hpp"
#include "lqp/innermax.hpp"
#include "lqp/rng.hpp"

namespace lqp {

namespace {

void check_regime(double k) {
  if (!std::isfinite(k) || k <= 0.5 || k == 1.0) {
    throw Error(ErrorCode::OutOfRegime, "requires k > 1/2 and k != 1");
  }
}

double beta_kappa_gaussian() {
  const PriorStats ps = prior_stats({PriorFamily::Gaussian, 1});
  return ps.beta_bar * ps.kappa;
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

McEstimate mc_true_cost(const QuadraticForm& qf, const EllipsoidalHypothesis& h,
                        const PriorSpec& prior, const Matrix& P, long n_samples,
                        std::uint64_t seed, int workers) {
  const int n = qf.n;
  if (n_samples < 1) throw Error(ErrorCode::InvalidParameter, "n_samples must be positive");
  if (prior.n != n) throw Error(ErrorCode::InvalidParameter, "prior dimension does not match");
  if (P.rows() != n || P.cols() != n) throw Error(ErrorCode::InvalidMatrix, "P must be n x n");
  const Matrix Ps = symmetrize(P);
  if ((Ps * Ps - Ps).norm() > 1e-8 * (1.0 + Ps.norm())) {
    throw Error(ErrorCode::InvalidMatrix, "P must be an orthogonal projection");
  }

  const DerivedCoefficients dc = derive_coefficients(qf, h);
  const double bayes = (dc.D.array() * Ps.array()).sum() + dc.c;

  const Matrix& C = h.C;
  const Matrix Q21 = qf.Q21();
  const Matrix Q22 = qf.Q22();
  const EigenDecomposition qm = eig_sym(dc.Qm);
  const Matrix W = qm.eigenvectors.transpose() * C.transpose() * (Q21 + Q22) * Ps;
  const Vector w0 = -(qm.eigenvectors.transpose() * C.transpose() * (Q21 * qf.l1() + Q22 * qf.l2()));
  const bool sphere = prior.family == PriorFamily::Sphere;
  const double radius = std::sqrt(static_cast<double>(n));

  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  auto work = [&](std::size_t begin, std::size_t end) {
    Vector x(n);
    for (std::size_t i = begin; i < end; ++i) {
      SampleStream rs(seed, i);
      for (int j = 0; j < n; ++j) x(j) = rs.normal();
      if (sphere) x *= radius / x.norm();
      samples[i] = worst_case_penalty_eig(qm, W * x + w0);
    }
  };
  const std::size_t total = samples.size();
  const std::size_t nw = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, total);
  if (nw == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t b = std::min(total, w * chunk);
      const std::size_t e = std::min(total, b + chunk);
      pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }

  McEstimate est;
  est.n_samples = n_samples;
  est.seed = seed;
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mn == *mx) {
    est.mean = bayes + *mn;
    est.std_error = 0.0;
    return est;
  }
  const double mean_pen = pairwise_sum(samples.data(), total) / static_cast<double>(total);
  std::vector<double> dev(total);
  for (std::size_t i = 0; i < total; ++i) dev[i] = (samples[i] - mean_pen) * (samples[i] - mean_pen);
  const double var = total > 1 ? pairwise_sum(dev.data(), total) / static_cast<double>(total - 1) : 0.0;
  est.mean = bayes + mean_pen;
  est.std_error = std::sqrt(var / static_cast<double>(total));
  if (!std::isfinite(est.mean) || !std::isfinite(est.std_error)) {
    throw Error(ErrorCode::NumericalFailure, "Monte Carlo estimate is not finite");
  }
  return est;
}

ThresholdTriple thresholds_1d(double k) {
  check_regime(k);
  const double a = std::abs(1.0 - k);
  ThresholdTriple t;
  t.eps_minus = (2.0 * k - 1.0) / (2.0 * a);
  t.eps_star = (2.0 * k - 1.0) / (2.0 * std::sqrt(2.0 / std::numbers::pi) * a);
  t.eps_plus = (2.0 * k - 1.0) / (2.0 * beta_kappa_gaussian() * a);
  return t;
}

OpeningThresholds opening_thresholds(double k, int n) {
  check_regime(k);
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be positive");
  const double a = std::abs(1.0 - k);
  const double rn = std::sqrt(static_cast<double>(n));
  const double bk = beta_kappa_gaussian();
  OpeningThresholds out;
  out.triple.eps_minus = (2.0 * k - 1.0) * rn / (2.0 * a);
  out.triple.eps_star = (2.0 * k - 1.0) * n / (2.0 * a * gaussian_mean_norm(n));
  out.triple.eps_plus = out.triple.eps_minus / bk;
  out.ratio_plus_minus = 1.0 / bk;
  return out;
}

OpeningTableRow opening_table_row(double k, int n, double eps) {
  const PriorStats ps = prior_stats({PriorFamily::Gaussian, n});
  const double a = std::abs(1.0 - k);
  const double rn = std::sqrt(static_cast<double>(n));
  const double base_ni = k * k * n;
  const double base_fi = (1.0 - 2.0 * k) * n + k * k * n;
  const double e2 = eps * eps;
  const double shrink = 1.0 - ps.beta_bar * ps.beta_bar;
  OpeningTableRow row;
  row.epsilon = eps;
  row.abp_ni = base_ni + e2;
  row.abp_fi = base_fi + e2 + 2.0 * eps * a * gaussian_mean_norm(n);
  row.pp_ni = base_ni + e2;
  row.pp_fi = base_fi + e2 + 2.0 * eps * a * rn;
  row.pop_ni = base_ni + shrink * e2;
  row.pop_fi = base_fi + shrink * e2 + 2.0 * ps.beta_bar * ps.kappa * eps * a * rn;
  return row;
}

double opening_linear_best(double k, int n, double eps) {
  const double a = std::abs(1.0 - k);
  const double bracket = (1.0 - 2.0 * k) * n + 2.0 * eps * a * gaussian_mean_norm(n);
  return k * k * n + eps * eps + std::min(bracket, 0.0);
}

double radius_threshold_star(double k, double eps) {
  check_regime(k);
  return 2.0 * eps * std::abs(1.0 - k) / (2.0 * k - 1.0);
}

double radius_threshold_cost(double k, int n, double eps, double R, int quad_depth) {
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorCode::InvalidParameter, "R must be positive");
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be positive");
  const double log_norm = (0.5 * n - 1.0) * std::log(2.0) + std::lgamma(0.5 * n);
  auto moment = [&](int m) {
    auto integrand = [&](double r) {
      return std::exp((n - 1 + m) * std::log(r) - 0.5 * r * r - log_norm);
    };
    // The chi(n) density beyond R + 40 sqrt(n) is below exp(-800 n).
    const double upper = R + 40.0 * std::sqrt(static_cast<double>(n));
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, R, upper, static_cast<unsigned>(quad_depth), 1e-12, &error, &l1);
    if (!std::isfinite(value) || error > 1e-10 * std::max(l1, 1e-300) + 1e-300) {
      throw Error(ErrorCode::NumericalFailure, "quadrature did not converge");
    }
    return value;
  };
  const double T1 = moment(1);
  const double T2 = moment(2);
  return (1.0 - 2.0 * k) * T2 + k * k * n + eps * eps + 2.0 * eps * std::abs(1.0 - k) * T1;
}

std::vector<RadiusPoint> radius_scan(double k, int n, double eps, double R_lo, double R_hi,
                                     int steps) {
  if (steps < 1 || !(R_lo > 0.0) || !(R_hi >= R_lo)) {
    throw Error(ErrorCode::InvalidParameter, "invalid radius scan range");
  }
  std::vector<RadiusPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double R = steps == 1 ? R_lo : R_lo + (R_hi - R_lo) * i / (steps - 1);
    out.push_back({R, radius_threshold_cost(k, n, eps, R)});
  }
  return out;
}

}  // namespace lqp
