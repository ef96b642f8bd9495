#include "lqp/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "lqp/error.hpp"
#include "lqp/evaluator.hpp"
#include "lqp/instance_file.hpp"

namespace lqp::cli {

namespace {

using json = nlohmann::ordered_json;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::OracleDiverged:
    case ErrorCode::NumericalFailure:
      return kNumericalFailure;
    default:
      return kInputError;
  }
}

template <typename F>
int run_guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InputError, path + ": cannot open for writing");
  out << content;
  if (!out) throw Error(ErrorCode::InputError, path + ": write failed");
}

// Sibling file name: "<stem>_<suffix>.csv" next to `path`.
std::string sibling(const std::string& path, const std::string& suffix) {
  std::string stem = path;
  const auto slash = stem.find_last_of('/');
  const auto dot = stem.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) stem.resize(dot);
  return stem + "_" + suffix + ".csv";
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw Error(ErrorCode::InputError, "steps must be at least 1");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo) {
    throw Error(ErrorCode::InputError, "epsilon range must satisfy 0 <= eps_lo <= eps_hi");
  }
  if (steps > 1 && !(hi > lo)) throw Error(ErrorCode::InputError, "eps_hi must exceed eps_lo when steps > 1");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    grid.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
  }
  return grid;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string sweep_csv(const SweepResult& result, bool with_mc) {
  std::string out = "epsilon,val_uop,val_pop,val_spop,val_pp,val_2uop,rank_pp";
  if (with_mc) out += ",mc_true_mean,mc_true_stderr";
  out += "\n";
  for (const SweepRow& r : result.rows) {
    out += format_double(r.epsilon) + "," + format_double(r.val_uop) + "," + format_double(r.val_pop) +
           "," + format_double(r.val_spop) + "," + format_double(r.val_pp) + "," +
           format_double(r.val_2uop) + "," + std::to_string(r.rank_pp);
    if (with_mc) {
      out += "," + (r.mc_true_mean ? format_double(*r.mc_true_mean) : std::string()) + "," +
             (r.mc_true_stderr ? format_double(*r.mc_true_stderr) : std::string());
    }
    out += "\n";
  }
  return out;
}

int cmd_solve(const SolveOptions& opt, std::ostream& err) {
  return run_guarded(err, [&] {
    std::vector<Program> programs;
    if (opt.program == "all") {
      programs = {Program::BP, Program::UOP, Program::POP, Program::SPOP, Program::PP};
    } else if (auto p = program_from_string(opt.program)) {
      programs = {*p};
    } else {
      throw Error(ErrorCode::InputError, "unknown program '" + opt.program + "'");
    }
    if (opt.rho && !(*opt.rho > 0.0)) throw Error(ErrorCode::InputError, "--rho must be positive");

    const InstanceFile inst = load_instance(opt.instance_path);
    const DerivedCoefficients dc = derive_coefficients(inst.qf, inst.hypothesis);
    const PriorStats ps = prior_stats(inst.prior);
    const double rho = opt.rho.value_or(default_rho(dc));

    json doc;
    doc["schema_version"] = "1";
    doc["program"] = opt.program;
    json results = json::array();
    for (Program p : programs) {
      const ProgramSolution sol = solve(p, dc, ps, rho);
      json r;
      r["program"] = to_string(p);
      r["value"] = sol.value;
      r["rank"] = sol.rank;
      r["projection_rank"] = sol.projection_rank;
      r["rho"] = sol.rho;
      r["oracle_calls"] = sol.oracle_calls;
      r["Sigma"] = matrix_json(sol.Sigma);
      results.push_back(r);
    }
    doc["results"] = results;

    json coeff;
    coeff["D"] = matrix_json(dc.D);
    coeff["E"] = matrix_json(dc.E);
    coeff["f"] = dc.f;
    coeff["c"] = dc.c;
    coeff["lambda_bar"] = dc.lambda_bar;
    coeff["lambda_bar_2"] = dc.lambda_bar_2;
    coeff["t_bar"] = dc.t_bar;
    doc["coefficients"] = coeff;

    json prior;
    prior["family"] = inst.prior.family == PriorFamily::Gaussian ? "gaussian" : "sphere";
    prior["n"] = inst.prior.n;
    prior["kappa"] = ps.kappa;
    prior["beta_bar"] = ps.beta_bar;
    prior["gamma_bar"] = ps.gamma_bar;
    doc["prior"] = prior;

    const SignalingCheck sig = signaling_profitable(dc);
    json structure;
    structure["no_info_optimal"] = no_info_optimal(dc.D);
    structure["signaling_profitable"] = sig.profitable;
    structure["signaling_test_applicable"] = sig.applicable;
    structure["center_shifted"] = inst.hypothesis.center_shifted;
    doc["structure"] = structure;

    // Threshold for the family s -> (s E0, s f0) built on the base matrix C0.
    const DerivedCoefficients base =
        derive_coefficients(inst.qf, EllipsoidalHypothesis::from_matrix(inst.base_C()));
    const double s = pessimistic_noinfo_threshold(dc.D, base.E, base.f);
    json thr;
    thr["raw_inequality_solution_s"] = number(s);
    thr["reading_eps_equals_s"] = number(s);
    thr["reading_eps_equals_sqrt_s"] = number(std::sqrt(s));
    doc["pessimistic_noinfo_threshold"] = thr;

    write_output(opt.out_path, doc.dump(2) + "\n");
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const SweepOptions& opt, std::ostream& err) {
  return run_guarded(err, [&] {
    if (opt.rho && !(*opt.rho > 0.0)) throw Error(ErrorCode::InputError, "--rho must be positive");
    if (opt.mc_samples && *opt.mc_samples < 1) throw Error(ErrorCode::InputError, "--mc-samples must be positive");
    const std::vector<double> grid = linear_grid(opt.eps_lo, opt.eps_hi, opt.steps);
    const InstanceFile inst = load_instance(opt.instance_path);
    const Matrix C0 = inst.base_C();
    const DerivedCoefficients base =
        derive_coefficients(inst.qf, EllipsoidalHypothesis::from_matrix(C0));
    const PriorStats ps = prior_stats(inst.prior);
    SweepResult res = sweep(base, ps, grid, opt.rho, opt.workers);
    if (opt.mc_samples) {
      for (SweepRow& row : res.rows) {
        const McEstimate est =
            mc_true_cost(inst.qf, EllipsoidalHypothesis::scaled(C0, row.epsilon), inst.prior,
                         row.pp_projection, *opt.mc_samples, opt.mc_seed, opt.workers);
        row.mc_true_mean = est.mean;
        row.mc_true_stderr = est.std_error;
      }
    }
    write_output(opt.out_path, sweep_csv(res, opt.mc_samples.has_value()));
    return static_cast<int>(kOk);
  });
}

int cmd_example(const ExampleOptions& opt, std::ostream& err) {
  return run_guarded(err, [&] {
    int n = opt.n;
    if (opt.which == "oned") {
      n = 1;
    } else if (opt.which != "opening") {
      throw Error(ErrorCode::InputError, "--which must be 'oned' or 'opening'");
    }
    if (n < 1) throw Error(ErrorCode::InputError, "--n must be positive");
    const OpeningThresholds th = opening_thresholds(opt.k, n);
    const std::vector<double> grid = linear_grid(opt.eps_lo, opt.eps_hi, opt.steps);

    std::string table = "epsilon,abp_ni,abp_fi,pp_ni,pp_fi,pop_ni,pop_fi\n";
    for (double eps : grid) {
      const OpeningTableRow r = opening_table_row(opt.k, n, eps);
      table += format_double(r.epsilon) + "," + format_double(r.abp_ni) + "," + format_double(r.abp_fi) +
               "," + format_double(r.pp_ni) + "," + format_double(r.pp_fi) + "," +
               format_double(r.pop_ni) + "," + format_double(r.pop_fi) + "\n";
    }
    std::string thresholds = "name,value\n";
    thresholds += "eps_minus," + format_double(th.triple.eps_minus) + "\n";
    thresholds += "eps_star," + format_double(th.triple.eps_star) + "\n";
    thresholds += "eps_plus," + format_double(th.triple.eps_plus) + "\n";
    thresholds += "ratio_plus_minus," + format_double(th.ratio_plus_minus) + "\n";

    std::string radius;
    if (opt.radius_eps) {
      if (opt.which != "opening") throw Error(ErrorCode::InputError, "--radius-eps needs --which opening");
      const double eps = *opt.radius_eps;
      const double r_star = radius_threshold_star(opt.k, eps);
      if (!(r_star > 0.0)) throw Error(ErrorCode::InputError, "--radius-eps must be positive");
      const double linear = opening_linear_best(opt.k, n, eps);
      radius = "R,cost,linear_best\n";
      for (const RadiusPoint& p : radius_scan(opt.k, n, eps, r_star * (1.0 + 1e-9), 4.0 * r_star,
                                              opt.radius_steps)) {
        radius += format_double(p.R) + "," + format_double(p.cost) + "," + format_double(linear) + "\n";
      }
    }

    if (opt.out_path.empty() || opt.out_path == "-") {
      write_output("-", table + "\n" + thresholds + (radius.empty() ? "" : "\n" + radius));
    } else {
      write_output(opt.out_path, table);
      write_output(sibling(opt.out_path, "thresholds"), thresholds);
      if (!radius.empty()) write_output(sibling(opt.out_path, "radius"), radius);
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace lqp::cli
