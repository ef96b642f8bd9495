#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "lqp/programs.hpp"

namespace lqp::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalFailure = 3 };

struct SolveOptions {
  std::string instance_path;
  std::string program = "all";  // bp, pp, uop, pop, spop or all
  std::optional<double> rho;
  std::string out_path;  // empty or "-" writes to stdout
};

struct SweepOptions {
  std::string instance_path;
  double eps_lo = 0.0;
  double eps_hi = 2.5;
  int steps = 200;
  std::optional<double> rho;
  std::optional<long> mc_samples;
  std::uint64_t mc_seed = 1;
  int workers = 1;
  std::string out_path;
};

struct ExampleOptions {
  std::string which = "oned";  // oned or opening
  double k = 2.0;
  int n = 1;
  double eps_lo = 0.0;
  double eps_hi = 8.0;
  int steps = 161;
  std::optional<double> radius_eps;  // opening only: also write the radius-threshold scan
  int radius_steps = 400;
  std::string out_path;
};

/// Locale-independent shortest round-trip form, at most 17 significant digits.
std::string format_double(double x);

std::string sweep_csv(const SweepResult& result, bool with_mc);

int cmd_solve(const SolveOptions& opt, std::ostream& err);
int cmd_sweep(const SweepOptions& opt, std::ostream& err);
int cmd_example(const ExampleOptions& opt, std::ostream& err);

}  // namespace lqp::cli
