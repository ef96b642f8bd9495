#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lqp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Solve and bound sender programs in almost-Bayesian linear-quadratic persuasion"};
  app.require_subcommand(1);

  lqp::cli::SolveOptions solve;
  double solve_rho = 0.0;
  auto* s = app.add_subcommand("solve", "Solve one or all programs for an instance file");
  s->add_option("--instance", solve.instance_path, "Instance file (JSON)")->required();
  s->add_option("--program", solve.program, "bp, pp, uop, pop, spop or all")
      ->check(CLI::IsMember({"bp", "pp", "uop", "pop", "spop", "all"}));
  auto* s_rho = s->add_option("--rho", solve_rho, "Suboptimality bound for grid-searched programs");
  s->add_option("--out", solve.out_path, "Output path (default stdout)");

  lqp::cli::SweepOptions sweep;
  double sweep_rho = 0.0;
  long mc_samples = 0;
  auto* w = app.add_subcommand("sweep", "Solve UOP/POP/SPOP/PP over a grid C = eps * C0");
  w->add_option("--instance", sweep.instance_path, "Instance file (JSON)")->required();
  w->add_option("--eps-lo", sweep.eps_lo, "First epsilon")->capture_default_str();
  w->add_option("--eps-hi", sweep.eps_hi, "Last epsilon")->capture_default_str();
  w->add_option("--steps", sweep.steps, "Number of grid points")->capture_default_str();
  auto* w_rho = w->add_option("--rho", sweep_rho, "Suboptimality bound");
  auto* w_mc = w->add_option("--mc-samples", mc_samples, "Monte Carlo samples for the true cost of the PP policy");
  w->add_option("--mc-seed", sweep.mc_seed, "Monte Carlo seed")->capture_default_str();
  w->add_option("--workers", sweep.workers, "Worker threads")->capture_default_str();
  w->add_option("--out", sweep.out_path, "Output CSV (default stdout)");

  lqp::cli::ExampleOptions example;
  double radius_eps = 0.0;
  auto* e = app.add_subcommand("example", "Closed-form tables for the one-dimensional and opening examples");
  e->add_option("--which", example.which, "oned or opening")->check(CLI::IsMember({"oned", "opening"}));
  e->add_option("--k", example.k, "Cost parameter k")->capture_default_str();
  e->add_option("--n", example.n, "Dimension (opening only)")->capture_default_str();
  e->add_option("--eps-lo", example.eps_lo, "First epsilon")->capture_default_str();
  e->add_option("--eps-hi", example.eps_hi, "Last epsilon")->capture_default_str();
  e->add_option("--steps", example.steps, "Number of grid points")->capture_default_str();
  auto* e_rad = e->add_option("--radius-eps", radius_eps, "Also scan radius-threshold policies at this epsilon");
  e->add_option("--radius-steps", example.radius_steps, "Radii in the scan")->capture_default_str();
  e->add_option("--out", example.out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : lqp::cli::kInputError;
  }

  if (*s) {
    if (*s_rho) solve.rho = solve_rho;
    return lqp::cli::cmd_solve(solve, std::cerr);
  }
  if (*w) {
    if (*w_rho) sweep.rho = sweep_rho;
    if (*w_mc) sweep.mc_samples = mc_samples;
    return lqp::cli::cmd_sweep(sweep, std::cerr);
  }
  if (*e_rad) example.radius_eps = radius_eps;
  return lqp::cli::cmd_example(example, std::cerr);
}
