#include "lqp/programs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <thread>

#include "lqp/error.hpp"

namespace lqp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_sqrt(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

double trace_prod(const Matrix& A, const Matrix& B) { return (A.array() * B.array()).sum(); }

double max_abs_eig(const EigenDecomposition& ed) {
  return ed.eigenvalues.size() == 0 ? 0.0 : ed.eigenvalues.cwiseAbs().maxCoeff();
}

// Spectral data of D + lambda E needed by the dual.
struct DualPoint {
  double lambda = 0.0;
  Matrix P_lt;
  Matrix P_le;
  double g_lt = 0.0;  // Tr(E P_lt)
  double g_le = 0.0;  // Tr(E P_le)
  double G = 0.0;     // sum of negative eigenvalues of D + lambda E
};

DualPoint dual_point(const Matrix& D, const Matrix& E, double lambda, double band) {
  DualPoint dp;
  dp.lambda = lambda;
  const EigenDecomposition ed = eig_sym(D + lambda * E);
  const NegProjections np = neg_projections(ed, band);
  dp.P_lt = np.lt;
  dp.P_le = np.le;
  dp.g_lt = trace_prod(E, dp.P_lt);
  dp.g_le = trace_prod(E, dp.P_le);
  for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
    if (ed.eigenvalues(i) < 0.0) dp.G += ed.eigenvalues(i);
  }
  return dp;
}

// Orthonormal bases of range(E) and ker(E).
void split_range_kernel(const Matrix& E, Matrix& Y, Matrix& Z) {
  const EigenDecomposition ed = eig_sym(E);
  const double tol = 1e-9 * (1.0 + max_abs_eig(ed));
  Eigen::Index r = 0;
  while (r < ed.eigenvalues.size() && ed.eigenvalues(r) > tol) ++r;
  Y = ed.eigenvectors.leftCols(r);
  Z = ed.eigenvectors.rightCols(ed.eigenvalues.size() - r);
}

HOracleResult endpoint_solution(const Matrix& D, const Matrix& E, double t, bool full_range) {
  Matrix Y;
  Matrix Z;
  split_range_kernel(E, Y, Z);
  const Eigen::Index n = D.rows();
  Matrix X = Matrix::Zero(n, n);
  if (full_range) X += Y * Y.transpose();
  if (Z.cols() > 0) {
    const Matrix Dz = symmetrize(Z.transpose() * D * Z);
    X += Z * neg_projections(Dz).lt * Z.transpose();
  }
  HOracleResult res;
  res.t = t;
  res.X = symmetrize(X);
  res.value = trace_prod(D, res.X);
  res.lambda_dual = full_range ? -kInf : kInf;
  res.interpolation_theta = 0.0;
  res.dual_value = res.value;
  res.duality_gap = 0.0;
  return res;
}

HOracleResult interpolate(const Matrix& D, const Matrix& E, double t, const DualPoint& big,
                          const Matrix& X_big, double g_big, const DualPoint& small,
                          const Matrix& X_small, double g_small) {
  HOracleResult res;
  res.t = t;
  const double denom = g_big - g_small;
  double theta = denom > 0.0 ? (t - g_small) / denom : 0.0;
  theta = std::clamp(theta, 0.0, 1.0);
  res.interpolation_theta = theta;
  res.X = symmetrize(X_small + theta * (X_big - X_small));
  res.value = trace_prod(D, res.X);
  const double phi_big = big.G - big.lambda * t;
  const double phi_small = small.G - small.lambda * t;
  if (phi_big >= phi_small) {
    res.dual_value = phi_big;
    res.lambda_dual = big.lambda;
  } else {
    res.dual_value = phi_small;
    res.lambda_dual = small.lambda;
  }
  res.duality_gap = std::abs(res.value - res.dual_value);
  (void)E;
  return res;
}

}  // namespace

const char* to_string(Program p) {
  switch (p) {
    case Program::BP: return "bp";
    case Program::PP: return "pp";
    case Program::UOP: return "uop";
    case Program::POP: return "pop";
    case Program::SPOP: return "spop";
  }
  return "unknown";
}

std::optional<Program> program_from_string(const std::string& name) {
  if (name == "bp") return Program::BP;
  if (name == "pp") return Program::PP;
  if (name == "uop") return Program::UOP;
  if (name == "pop") return Program::POP;
  if (name == "spop") return Program::SPOP;
  return std::nullopt;
}

HOracleResult h_eq(const Matrix& Din, const Matrix& Ein, double t, double tol) {
  const Matrix D = symmetrize(Din);
  const Matrix E = symmetrize(Ein);
  if (D.rows() != E.rows()) throw Error(ErrorCode::InvalidMatrix, "D and E dimensions differ");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidTolerance, "oracle tolerance must be positive");
  const EigenDecomposition eE = eig_sym(E);
  const double e_norm = max_abs_eig(eE);
  if (eE.eigenvalues.size() && eE.eigenvalues.minCoeff() < -1e-9 * (1.0 + e_norm)) {
    throw Error(ErrorCode::NotPSD, "E must be positive semidefinite");
  }
  const double trE = E.trace();
  const double t_tol = 1e-9 * (1.0 + std::abs(trE));
  if (!std::isfinite(t) || t < -t_tol || t > trE + t_tol) {
    throw Error(ErrorCode::InfeasibleTrace, "trace target outside [0, Tr E]");
  }
  t = std::clamp(t, 0.0, std::max(trE, 0.0));
  const double edge = 1e-14 * (1.0 + std::abs(trE));

  // lambda = 0 with the tolerance band: covers t = t_bar and singular D.
  const double band0 = default_zero_tol(D);
  const DualPoint z = dual_point(D, E, 0.0, band0);
  if (z.g_lt - edge <= t && t <= z.g_le + edge) {
    HOracleResult res = interpolate(D, E, t, z, z.P_le, z.g_le, z, z.P_lt, z.g_lt);
    res.lambda_dual = 0.0;
    return res;
  }
  if (t <= edge) return endpoint_solution(D, E, t, false);
  if (t >= trE - edge) return endpoint_solution(D, E, t, true);

  // Bracket [lo, hi]: every minimizer at lo has Tr(E X) > t, every minimizer at hi has < t.
  const double step0 = std::max(1e-3, (1.0 + spectral_norm(D)) / (1.0 + e_norm));
  DualPoint lo;
  DualPoint hi;
  int iterations = 0;
  auto classify = [&](const DualPoint& dp) {
    if (dp.g_lt > t) return -1;  // lambda too small
    if (dp.g_le < t) return 1;   // lambda too large
    return 0;
  };
  if (t < z.g_lt) {
    lo = dual_point(D, E, 0.0, 0.0);
    double lam = step0;
    for (;; lam *= 2.0) {
      if (++iterations > 2100) throw Error(ErrorCode::OracleDiverged, "dual bracket expansion failed");
      DualPoint dp = dual_point(D, E, lam, 0.0);
      const int c = classify(dp);
      if (c == 0) return interpolate(D, E, t, dp, dp.P_le, dp.g_le, dp, dp.P_lt, dp.g_lt);
      if (c > 0) { hi = std::move(dp); break; }
      lo = std::move(dp);
    }
  } else {
    hi = dual_point(D, E, 0.0, 0.0);
    double lam = -step0;
    for (;; lam *= 2.0) {
      if (++iterations > 2100) throw Error(ErrorCode::OracleDiverged, "dual bracket expansion failed");
      DualPoint dp = dual_point(D, E, lam, 0.0);
      const int c = classify(dp);
      if (c == 0) return interpolate(D, E, t, dp, dp.P_le, dp.g_le, dp, dp.P_lt, dp.g_lt);
      if (c < 0) { lo = std::move(dp); break; }
      hi = std::move(dp);
    }
  }

  constexpr int kMaxIter = 200;
  int bisect = 0;
  for (; bisect < kMaxIter; ++bisect) {
    const double width = hi.lambda - lo.lambda;
    const double scale = 1.0 + std::max(std::abs(lo.lambda), std::abs(hi.lambda));
    const double gap_bound = width * (lo.g_lt - hi.g_le);
    if (width <= 1e-12 * scale && gap_bound <= 0.1 * tol) break;
    const double mid = 0.5 * (lo.lambda + hi.lambda);
    if (mid <= lo.lambda || mid >= hi.lambda) break;
    DualPoint dp = dual_point(D, E, mid, 0.0);
    const int c = classify(dp);
    if (c == 0) {
      HOracleResult res = interpolate(D, E, t, dp, dp.P_le, dp.g_le, dp, dp.P_lt, dp.g_lt);
      res.iterations = iterations + bisect + 1;
      return res;
    }
    if (c < 0) lo = std::move(dp); else hi = std::move(dp);
  }

  HOracleResult res = interpolate(D, E, t, lo, lo.P_lt, lo.g_lt, hi, hi.P_le, hi.g_le);
  res.iterations = iterations + bisect;
  if (res.duality_gap > tol * (1.0 + std::abs(res.value))) {
    throw Error(ErrorCode::OracleDiverged, "duality gap certificate failed");
  }
  return res;
}

double program_objective(Program program, const DerivedCoefficients& dc, const PriorStats& ps,
                         const Matrix& Sigma) {
  const double lin = trace_prod(dc.D, Sigma) + dc.c;
  const double s = std::max(dc.f + trace_prod(dc.E, Sigma), 0.0);
  switch (program) {
    case Program::BP: return lin;
    case Program::UOP: return lin + dc.lambda_bar;
    case Program::PP: return lin + dc.lambda_bar + safe_sqrt(s);
    case Program::POP: {
      const double b = ps.beta_bar;
      return lin + (1.0 - b * b) * dc.lambda_bar + b * ps.kappa * safe_sqrt(s);
    }
    case Program::SPOP: {
      if (dc.lambda_bar <= 0.0) return lin + ps.kappa * safe_sqrt(s);
      const double zeta = ps.kappa * safe_sqrt(s) / dc.lambda_bar;
      return lin + dc.lambda_bar * (zeta >= 2.0 ? zeta : 1.0 + 0.25 * zeta * zeta);
    }
  }
  return lin;
}

Matrix extract_projection(const Matrix& X, const std::function<double(const Matrix&)>& objective,
                          const std::function<bool(const Matrix&)>& feasible) {
  const Matrix S = symmetrize(X);
  const Eigen::Index n = S.rows();
  if ((S * S - S).norm() <= 1e-9 * (1.0 + S.norm())) return S;

  const EigenDecomposition ed = eig_sym(S);
  constexpr double kLevelTol = 1e-9;
  std::vector<Eigen::Index> sizes{0};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ed.eigenvalues(i) <= kLevelTol) break;
    const bool last_of_level =
        i + 1 == n || ed.eigenvalues(i) - ed.eigenvalues(i + 1) > kLevelTol;
    if (last_of_level) sizes.push_back(i + 1);
  }
  Matrix best;
  double best_score = kInf;
  for (Eigen::Index k : sizes) {
    Matrix P = projection_from(ed, 0, k);
    if (feasible && k != sizes.back() && !feasible(P)) continue;
    const double score = objective(P);
    if (best.size() == 0 || score < best_score - 1e-12 * (1.0 + std::abs(best_score))) {
      best = std::move(P);
      best_score = score;
    }
  }
  return best;
}

namespace {

struct SearchResult {
  Matrix X;
  double t = 0.0;
  double J = kInf;
  long calls = 0;
};

// Best-first branch and bound over the square-root grid of the trace parameter.
SearchResult penalized_search(const Matrix& D, const Matrix& E, double f, double alpha,
                              double offset, double t_lo, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::InvalidTolerance, "rho must be positive");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidParameter, "alpha must be nonnegative");
  }
  if (!(t_lo >= 0.0)) throw Error(ErrorCode::InvalidParameter, "t_lo must be nonnegative");
  f = std::max(f, 0.0);
  const double trE = E.trace();
  if (t_lo > trE + 1e-9 * (1.0 + std::abs(trE))) {
    throw Error(ErrorCode::InfeasibleTrace, "t_lo exceeds Tr E");
  }
  t_lo = std::min(t_lo, std::max(trE, 0.0));
  const double t_bar = trace_prod(E, neg_projections(symmetrize(D)).lt);
  const double t_hi = std::max(t_bar, t_lo);

  struct Point {
    double t;
    double J;
    double dual;   // lower bound on h(t)
    double lambda;
    Matrix X;
  };
  std::map<long, Point> cache;
  SearchResult out;

  auto evaluate = [&](long k, double t) -> const Point& {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    HOracleResult h = h_eq(D, E, t);
    ++out.calls;
    Point p{t, h.value + offset + alpha * safe_sqrt(f + t), h.dual_value, h.lambda_dual,
            std::move(h.X)};
    const double tie = 1e-12 * (1.0 + std::abs(out.J));
    if (out.X.size() == 0 || p.J < out.J - tie || (std::abs(p.J - out.J) <= tie && p.t < out.t)) {
      out.J = p.J;
      out.t = p.t;
      out.X = p.X;
    }
    return cache.emplace(k, std::move(p)).first->second;
  };

  if (alpha == 0.0 || t_hi - t_lo <= 1e-14 * (1.0 + std::abs(trE))) {
    evaluate(0, t_hi);
    return out;
  }

  const double r_lo = std::sqrt(f + t_lo);
  const double r_hi = std::sqrt(f + t_hi);
  const double delta = rho / alpha;
  const long N = std::max(1L, static_cast<long>(std::ceil((r_hi - r_lo) / delta)));
  auto grid_t = [&](long k) {
    if (k >= N) return t_hi;
    const double r = r_lo + static_cast<double>(k) * delta;
    return std::clamp(r * r - f, t_lo, t_hi);
  };
  auto root = [&](double t) { return safe_sqrt(f + t); };

  auto lower_bound = [&](const Point& a, const Point& b) {
    double lb = b.dual + alpha * root(a.t);
    if (std::isfinite(a.lambda) && std::isfinite(b.lambda)) {
      const double ra = root(a.t);
      const double rb = root(b.t);
      const double slope = b.t > a.t ? (rb - ra) / (b.t - a.t) : 0.0;
      const double Ga = a.dual + a.lambda * a.t;
      const double Gb = b.dual + b.lambda * b.t;
      auto line_env = [&](double s) {
        return std::max(Ga - a.lambda * s, Gb - b.lambda * s) + alpha * (ra + slope * (s - a.t));
      };
      double m = std::min(line_env(a.t), line_env(b.t));
      if (a.lambda != b.lambda) {
        const double s = (Ga - Gb) / (a.lambda - b.lambda);
        if (s > a.t && s < b.t) m = std::min(m, line_env(s));
      }
      lb = std::max(lb, m);
    }
    return lb + offset;
  };

  struct Node {
    double lb;
    long a;
    long b;
    bool operator>(const Node& o) const { return lb != o.lb ? lb > o.lb : a > o.a; }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<>> queue;
  {
    const Point& pa = evaluate(0, grid_t(0));
    const Point& pb = evaluate(N, grid_t(N));
    queue.push({lower_bound(pa, pb), 0, N});
  }
  while (!queue.empty()) {
    const Node node = queue.top();
    queue.pop();
    if (node.lb >= out.J - rho) break;
    if (node.b - node.a <= 1) continue;
    const long m = node.a + (node.b - node.a) / 2;
    const Point& pm = evaluate(m, grid_t(m));
    const Point& pa = cache.at(node.a);
    const Point& pb = cache.at(node.b);
    queue.push({lower_bound(pa, pm), node.a, m});
    queue.push({lower_bound(pm, pb), m, node.b});
  }
  return out;
}

ProgramSolution finish(Program program, Matrix Sigma, double value, double rho, long calls,
                       const Matrix& projection) {
  ProgramSolution sol;
  sol.program = program;
  sol.Sigma = std::move(Sigma);
  sol.value = value;
  sol.rank = count_above(sol.Sigma, 1e-7);
  sol.rho = rho;
  sol.projection = projection;
  sol.projection_rank = count_above(projection, 0.5);
  sol.oracle_calls = calls;
  return sol;
}

// Rounds X with `objective`; keeps X only if rounding would make things worse.
ProgramSolution round_and_finish(Program program, const Matrix& X,
                                 const std::function<double(const Matrix&)>& objective,
                                 const std::function<bool(const Matrix&)>& feasible, double rho,
                                 long calls) {
  const Matrix P = extract_projection(X, objective, feasible);
  const double jx = objective(X);
  const double jp = objective(P);
  if (jp <= jx + 1e-12 * (1.0 + std::abs(jx))) return finish(program, P, jp, rho, calls, P);
  return finish(program, X, jx, rho, calls, P);
}

}  // namespace

ProgramSolution solve_penalized(const Matrix& Din, const Matrix& Ein, double f, double alpha,
                                double offset, double t_lo, double rho) {
  const Matrix D = symmetrize(Din);
  const Matrix E = symmetrize(Ein);
  const SearchResult sr = penalized_search(D, E, f, alpha, offset, t_lo, rho);
  const double fc = std::max(f, 0.0);
  auto objective = [&](const Matrix& S) {
    return trace_prod(D, S) + offset + alpha * safe_sqrt(fc + trace_prod(E, S));
  };
  const double tol = 1e-9 * (1.0 + std::abs(E.trace()));
  std::function<bool(const Matrix&)> feasible;
  if (t_lo > 0.0) feasible = [&](const Matrix& S) { return trace_prod(E, S) >= t_lo - tol; };
  return round_and_finish(Program::PP, sr.X, objective, feasible, rho, sr.calls);
}

double default_rho(const DerivedCoefficients& dc) {
  const double bp = trace_prod(dc.D, neg_projections(dc.D).lt) + dc.c;
  return 1e-6 * (1.0 + std::abs(bp));
}

ProgramSolution solve_bp(const DerivedCoefficients& dc) {
  const Matrix P = neg_projections(dc.D).lt;
  return finish(Program::BP, P, trace_prod(dc.D, P) + dc.c, 0.0, 0, P);
}

ProgramSolution solve_uop(const DerivedCoefficients& dc) {
  ProgramSolution sol = solve_bp(dc);
  sol.program = Program::UOP;
  sol.value += dc.lambda_bar;
  return sol;
}

ProgramSolution solve_pp(const DerivedCoefficients& dc, std::optional<double> rho) {
  const double r = rho.value_or(default_rho(dc));
  ProgramSolution sol = solve_penalized(dc.D, dc.E, dc.f, 1.0, dc.c + dc.lambda_bar, 0.0, r);
  sol.program = Program::PP;
  return sol;
}

ProgramSolution solve_pop(const DerivedCoefficients& dc, const PriorStats& ps,
                          std::optional<double> rho) {
  const double r = rho.value_or(default_rho(dc));
  const double b = ps.beta_bar;
  ProgramSolution sol = solve_penalized(dc.D, dc.E, dc.f, b * ps.kappa,
                                        dc.c + (1.0 - b * b) * dc.lambda_bar, 0.0, r);
  sol.program = Program::POP;
  return sol;
}

ProgramSolution solve_spop(const DerivedCoefficients& dc, const PriorStats& ps,
                           std::optional<double> rho) {
  const double r = rho.value_or(default_rho(dc));
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidTolerance, "rho must be positive");
  const double kappa = ps.kappa;
  const double lbar = dc.lambda_bar;
  auto objective = [&](const Matrix& S) { return program_objective(Program::SPOP, dc, ps, S); };

  if (lbar <= 1e-14 * (1.0 + std::abs(dc.c)) || kappa <= 0.0) {
    const double alpha = lbar <= 1e-14 * (1.0 + std::abs(dc.c)) ? kappa : 0.0;
    const double offset = alpha == kappa ? dc.c : dc.c + lbar;
    const SearchResult sr = penalized_search(dc.D, dc.E, dc.f, alpha, offset, 0.0, r);
    return round_and_finish(Program::SPOP, sr.X, objective, {}, r, sr.calls);
  }

  const double trE = dc.E.trace();
  const double t_check = 4.0 * lbar * lbar / (kappa * kappa) - dc.f;
  std::vector<Matrix> candidates;
  long calls = 0;

  // Branch A: Tr(E S) >= t_check, where the inner maximum sits at beta = 1.
  if (t_check <= trE + 1e-9 * (1.0 + std::abs(trE))) {
    const SearchResult sr =
        penalized_search(dc.D, dc.E, dc.f, kappa, dc.c, std::max(t_check, 0.0), r);
    calls += sr.calls;
    candidates.push_back(sr.X);
  }
  // Branch B: Tr(E S) <= t_check, a linear program in D + kappa^2 / (4 lbar) E.
  if (t_check >= 0.0) {
    const Matrix Dc = symmetrize(dc.D + (kappa * kappa / (4.0 * lbar)) * dc.E);
    const Matrix P = neg_projections(Dc).lt;
    if (trace_prod(dc.E, P) <= t_check || t_check >= trE) {
      candidates.push_back(P);
    } else {
      candidates.push_back(h_eq(Dc, dc.E, t_check).X);
      ++calls;
    }
  }
  const Matrix* best = &candidates.front();
  double best_val = objective(*best);
  for (const Matrix& X : candidates) {
    const double v = objective(X);
    if (v < best_val) {
      best_val = v;
      best = &X;
    }
  }
  return round_and_finish(Program::SPOP, *best, objective, {}, r, calls);
}

ProgramSolution solve(Program program, const DerivedCoefficients& dc, const PriorStats& ps,
                      std::optional<double> rho) {
  switch (program) {
    case Program::BP: return solve_bp(dc);
    case Program::UOP: return solve_uop(dc);
    case Program::PP: return solve_pp(dc, rho);
    case Program::POP: return solve_pop(dc, ps, rho);
    case Program::SPOP: return solve_spop(dc, ps, rho);
  }
  return solve_bp(dc);
}

bool no_info_optimal(const Matrix& D, double tol) {
  const EigenDecomposition ed = eig_sym(D);
  if (ed.eigenvalues.size() == 0) return true;
  if (tol < 0.0) tol = 1e-9 * (1.0 + max_abs_eig(ed));
  return ed.eigenvalues.minCoeff() >= -tol;
}

SignalingCheck signaling_profitable(const DerivedCoefficients& dc) {
  SignalingCheck out;
  const double gap = dc.lambda_bar - dc.lambda_bar_2;
  if (!(gap > 1e-12 * (1.0 + std::abs(dc.lambda_bar)))) return out;
  out.applicable = true;
  const EigenDecomposition ed = eig_sym(dc.D);
  const double dmax = ed.eigenvalues(0);
  const double threshold = -(dc.f + dc.E.trace()) / (4.0 * gap);
  const double tol = 1e-9 * (1.0 + max_abs_eig(ed));
  out.profitable = dmax < threshold - tol;
  return out;
}

double pessimistic_noinfo_threshold(const Matrix& D, const Matrix& E0, double f0) {
  const Matrix Ds = symmetrize(D);
  const double a = -trace_prod(Ds, neg_projections(Ds).lt);
  if (a <= 1e-12 * (1.0 + spectral_norm(Ds))) return 0.0;
  const EigenDecomposition ee = eig_sym(E0);
  const double lmin = ee.eigenvalues.size() ? ee.eigenvalues.minCoeff() : 0.0;
  if (lmin <= 1e-12 * (1.0 + max_abs_eig(ee))) return kInf;
  const double f = std::max(f0, 0.0);
  const double u = a * (std::sqrt(f) + std::sqrt(f + lmin)) / lmin;
  return u * u;
}

namespace {

SweepRow sweep_point(const DerivedCoefficients& dc_base, const PriorStats& ps, double eps,
                     double rho) {
  const DerivedCoefficients dc = scale_coefficients(dc_base, eps);
  const ProgramSolution uop = solve_uop(dc);
  ProgramSolution pop = solve_pop(dc, ps, rho);
  ProgramSolution spop = solve_spop(dc, ps, rho);
  ProgramSolution pp = solve_pp(dc, rho);

  // Every program may use the arguments found for the others; each stays rho-optimal.
  const std::vector<const Matrix*> pool{&uop.Sigma, &pop.Sigma, &spop.Sigma, &pp.Sigma};
  for (ProgramSolution* sol : {&pop, &spop, &pp}) {
    for (const Matrix* S : pool) {
      const double v = program_objective(sol->program, dc, ps, *S);
      const double tie = 1e-12 * (1.0 + std::abs(sol->value));
      const int rk = count_above(*S, 0.5);
      if (v < sol->value - tie || (std::abs(v - sol->value) <= tie && rk < sol->projection_rank)) {
        sol->value = v;
        sol->Sigma = *S;
        sol->projection = *S;
        sol->rank = count_above(*S, 1e-7);
        sol->projection_rank = rk;
      }
    }
  }

  SweepRow row;
  row.epsilon = eps;
  row.val_uop = uop.value;
  row.val_pop = pop.value;
  row.val_spop = spop.value;
  row.val_pp = pp.value;
  row.val_2uop = 2.0 * uop.value;
  row.rank_pp = pp.projection_rank;
  row.pp_projection = pp.projection;
  return row;
}

}  // namespace

SweepResult sweep(const DerivedCoefficients& dc_base, const PriorStats& ps,
                  const std::vector<double>& eps_grid, std::optional<double> rho, int workers) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!std::isfinite(eps_grid[i]) || eps_grid[i] < 0.0) {
      throw Error(ErrorCode::InvalidParameter, "epsilon values must be finite and nonnegative");
    }
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) {
      throw Error(ErrorCode::InvalidParameter, "epsilon grid must be strictly increasing");
    }
  }
  SweepResult out;
  out.rho = rho.value_or(default_rho(dc_base));
  if (!(out.rho > 0.0)) throw Error(ErrorCode::InvalidTolerance, "rho must be positive");
  out.rows.resize(eps_grid.size());

  const std::size_t count = eps_grid.size();
  const std::size_t nw = std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, std::max<std::size_t>(count, 1));
  if (nw == 1) {
    for (std::size_t i = 0; i < count; ++i) out.rows[i] = sweep_point(dc_base, ps, eps_grid[i], out.rho);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += nw) {
          out.rows[i] = sweep_point(dc_base, ps, eps_grid[i], out.rho);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace lqp
