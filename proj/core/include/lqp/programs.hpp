#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqp/instance.hpp"
#include "lqp/spectral.hpp"

namespace lqp {

enum class Program { BP, PP, UOP, POP, SPOP };

const char* to_string(Program p);
std::optional<Program> program_from_string(const std::string& name);

struct ProgramSolution {
  Program program = Program::BP;
  Matrix Sigma;
  double value = 0.0;
  int rank = 0;             // eigenvalues of Sigma above 1e-7
  double rho = 0.0;         // suboptimality bound, 0 when solved exactly
  Matrix projection;        // extracted orthogonal projection
  int projection_rank = 0;  // eigenvalues of the projection above 0.5
  long oracle_calls = 0;
};

struct HOracleResult {
  double t = 0.0;
  double value = 0.0;  // Tr(D X)
  Matrix X;
  double lambda_dual = 0.0;  // +-inf on the analytic endpoints
  double interpolation_theta = 0.0;
  double dual_value = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

/// min Tr(D X) over 0 <= X <= I with Tr(E X) = t, by bisection on the scalar dual.
HOracleResult h_eq(const Matrix& D, const Matrix& E, double t, double tol = 1e-9);

/// Objective of `program` at a covariance Sigma.
double program_objective(Program program, const DerivedCoefficients& dc, const PriorStats& ps,
                         const Matrix& Sigma);

/// Rounds X to one of the projections in its spectral staircase, keeping the best score.
/// Candidates rejected by `feasible` are skipped.
Matrix extract_projection(const Matrix& X, const std::function<double(const Matrix&)>& objective,
                          const std::function<bool(const Matrix&)>& feasible = {});

/// min Tr(D S) + offset + alpha sqrt(f + Tr(E S)) over 0 <= S <= I, Tr(E S) >= t_lo,
/// to within rho.
ProgramSolution solve_penalized(const Matrix& D, const Matrix& E, double f, double alpha,
                                double offset, double t_lo, double rho);

double default_rho(const DerivedCoefficients& dc);

ProgramSolution solve_bp(const DerivedCoefficients& dc);
ProgramSolution solve_uop(const DerivedCoefficients& dc);
ProgramSolution solve_pp(const DerivedCoefficients& dc, std::optional<double> rho = std::nullopt);
ProgramSolution solve_pop(const DerivedCoefficients& dc, const PriorStats& ps,
                          std::optional<double> rho = std::nullopt);
ProgramSolution solve_spop(const DerivedCoefficients& dc, const PriorStats& ps,
                           std::optional<double> rho = std::nullopt);
ProgramSolution solve(Program program, const DerivedCoefficients& dc, const PriorStats& ps,
                      std::optional<double> rho = std::nullopt);

bool no_info_optimal(const Matrix& D, double tol = -1.0);

struct SignalingCheck {
  bool profitable = false;
  bool applicable = false;  // false when the top eigenvalue of C^T Q22 C is not simple
};

SignalingCheck signaling_profitable(const DerivedCoefficients& dc);

/// Smallest s >= 0 with s * lambda_min(E0) >= (sqrt(s f0) - Tr(D P_D^<0))^2 - s f0.
/// Returns +inf when lambda_min(E0) is not positive.
double pessimistic_noinfo_threshold(const Matrix& D, const Matrix& E0, double f0);

struct SweepRow {
  double epsilon = 0.0;
  double val_uop = 0.0;
  double val_pop = 0.0;
  double val_spop = 0.0;
  double val_pp = 0.0;
  double val_2uop = 0.0;
  int rank_pp = 0;
  Matrix pp_projection;
  std::optional<double> mc_true_mean;
  std::optional<double> mc_true_stderr;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double rho = 0.0;
};

/// Solves UOP, POP, SPOP and PP for C = eps * C0 at each grid value, where dc_base
/// holds the coefficients for C0. Rows come back in grid order for any worker count.
SweepResult sweep(const DerivedCoefficients& dc_base, const PriorStats& ps,
                  const std::vector<double>& eps_grid, std::optional<double> rho = std::nullopt,
                  int workers = 1);

}  // namespace lqp
