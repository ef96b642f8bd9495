#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "lqp/cli.hpp"
#include "lqp/error.hpp"
#include "lqp/instance_file.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const std::string kData = LQP_TEST_DATA_DIR;
const std::string kNumerical = kData + "/numerical_example.json";

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lqp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name), std::ios::binary) << content;
    return path(name);
  }

  static std::string read(const std::string& p) { return read_file(p); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(LQP_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

std::string replace_hypothesis(const std::string& text, const std::string& hyp) {
  const auto pos = text.find("\"hypothesis\"");
  const auto end = text.find('\n', pos);
  return text.substr(0, pos) + "\"hypothesis\": " + hyp + "," + text.substr(end);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(lqp::cli::format_double(0.1), "0.1");
  EXPECT_EQ(lqp::cli::format_double(167.0), "167");
  EXPECT_EQ(lqp::cli::format_double(-2.5), "-2.5");
  for (double x : {1.0 / 3.0, 3.141592653589793, 1e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(lqp::cli::format_double(x)), x);
    EXPECT_EQ(lqp::cli::format_double(x).find(','), std::string::npos);
  }
}

TEST(InstanceFile, ParsesNumericalExample) {
  const auto inst = lqp::load_instance(kNumerical);
  EXPECT_EQ(inst.n, 3);
  EXPECT_EQ(inst.hypothesis_kind, "scaled_identity");
  EXPECT_EQ(inst.hypothesis.C, lqp::Matrix::Identity(3, 3));
  EXPECT_EQ(inst.prior.family, lqp::PriorFamily::Gaussian);
}

TEST(InstanceFile, SyntaxErrorReportsLine) {
  try {
    lqp::parse_instance("{\n  \"n\": 3,\n  oops\n}", "bad.json");
    FAIL();
  } catch (const lqp::Error& e) {
    EXPECT_EQ(e.code(), lqp::ErrorCode::InputError);
    EXPECT_NE(std::string(e.what()).find("bad.json:3"), std::string::npos) << e.what();
  }
}

TEST(InstanceFile, FieldErrorsReportPath) {
  const std::string base = read_file(kNumerical);
  auto message = [](const std::string& text) {
    try {
      lqp::parse_instance(text, "f.json");
    } catch (const lqp::Error& e) {
      EXPECT_EQ(e.code(), lqp::ErrorCode::InputError);
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(replace_hypothesis(base, "{\"wasserstein\": {\"epsilon\": \"x\"}}")).find("/hypothesis/wasserstein/epsilon"),
            std::string::npos);
  EXPECT_NE(message(replace_hypothesis(base, "{\"matrix\": [[1, 0], [0, 1]]}")).find("/hypothesis/matrix"),
            std::string::npos);
  EXPECT_NE(message(replace_hypothesis(base, "{\"scaled_identity\": 1, \"matrix\": [[1]]}")).find("hypothesis"),
            std::string::npos);
  std::string extra = base;
  extra.insert(extra.find("\"n\""), "\"bogus\": 1, ");
  EXPECT_NE(message(extra).find("bogus"), std::string::npos);
  std::string prior = base;
  prior.replace(prior.find("\"n\": 3}"), 7, "\"n\": 2}");
  EXPECT_NE(message(prior).find("/prior/n"), std::string::npos);
}

TEST(InstanceFile, RawGameAndHypothesisBlocks) {
  const std::string text = R"({
    "schema_version": "1", "n": 1,
    "raw": {"k": 1, "M": [[4, -2], [-2, 1]], "B": [[1]]},
    "hypothesis": {"costly_update": {"R": [[1, 1], [1, 4]], "epsilon": 1}},
    "prior": {"family": "sphere", "n": 1}
  })";
  const auto inst = lqp::parse_instance(text);
  ASSERT_TRUE(inst.raw.has_value());
  EXPECT_NEAR(inst.qf.Q(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(inst.hypothesis.C(0, 0), 2.0, 1e-12);
  EXPECT_EQ(inst.prior.family, lqp::PriorFamily::Sphere);

  const std::string affine = R"({"schema_version": "1", "n": 1, "reduced": {"Q": [[4, -2], [-2, 1]]},
    "hypothesis": {"affine_distortion": {"chi": 0.5, "epsilon": 2}}})";
  const auto a = lqp::parse_instance(affine);
  EXPECT_TRUE(a.hypothesis.center_shifted);
  EXPECT_DOUBLE_EQ(a.hypothesis.C(0, 0), 1.0);
}

TEST_F(CliTest, SolveBpOnNumericalExample) {
  lqp::cli::SolveOptions opt;
  opt.instance_path = kNumerical;
  opt.program = "bp";
  opt.out_path = path("bp.json");
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_solve(opt, err), 0) << err.str();
  const json doc = json::parse(read(opt.out_path));
  EXPECT_EQ(doc["schema_version"], "1");
  EXPECT_NEAR(doc["results"][0]["value"].get<double>(), 210.0 - 43.0, 1e-9);
  EXPECT_EQ(doc["results"][0]["rank"], 3);
  EXPECT_DOUBLE_EQ(doc["coefficients"]["lambda_bar"].get<double>(), 4.0);
  EXPECT_FALSE(doc["structure"]["no_info_optimal"].get<bool>());
  const double s = doc["pessimistic_noinfo_threshold"]["raw_inequality_solution_s"].get<double>();
  EXPECT_NEAR(doc["pessimistic_noinfo_threshold"]["reading_eps_equals_sqrt_s"].get<double>(), std::sqrt(s), 1e-12);
}

TEST_F(CliTest, SolveAllAtZeroScaleGivesEqualValues) {
  const std::string inst =
      write("zero.json", replace_hypothesis(read(kNumerical), "{\"scaled_identity\": 0}"));
  lqp::cli::SolveOptions opt;
  opt.instance_path = inst;
  opt.out_path = path("all.json");
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_solve(opt, err), 0) << err.str();
  const json doc = json::parse(read(opt.out_path));
  ASSERT_EQ(doc["results"].size(), 5u);
  for (const auto& r : doc["results"]) EXPECT_NEAR(r["value"].get<double>(), 167.0, 1e-9) << r["program"];
}

TEST_F(CliTest, SolvePpRhoSelfConsistency) {
  auto value = [&](double rho) {
    lqp::cli::SolveOptions opt;
    opt.instance_path = kNumerical;
    opt.program = "pp";
    opt.rho = rho;
    opt.out_path = path("pp.json");
    std::stringstream err;
    EXPECT_EQ(lqp::cli::cmd_solve(opt, err), 0);
    return json::parse(read(opt.out_path))["results"][0]["value"].get<double>();
  };
  EXPECT_LE(std::abs(value(1e-3) - value(1e-5)), 1e-3);
}

TEST_F(CliTest, SweepCsvShape) {
  lqp::cli::SweepOptions opt;
  opt.instance_path = kNumerical;
  opt.out_path = path("sweep.csv");
  opt.rho = 1e-4;
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_sweep(opt, err), 0) << err.str();
  const auto rows = lines(read(opt.out_path));
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0], "epsilon,val_uop,val_pop,val_spop,val_pp,val_2uop,rank_pp");
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
  EXPECT_EQ(rows[1].back(), '3');
  EXPECT_EQ(rows.back().back(), '0');
  EXPECT_EQ(read(opt.out_path).find('\r'), std::string::npos);
}

TEST_F(CliTest, SweepSingleStepAndMcColumns) {
  lqp::cli::SweepOptions opt;
  opt.instance_path = kNumerical;
  opt.eps_lo = 0.5;
  opt.eps_hi = 0.5;
  opt.steps = 1;
  opt.mc_samples = 2000;
  opt.out_path = path("one.csv");
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_sweep(opt, err), 0) << err.str();
  const auto rows = lines(read(opt.out_path));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "epsilon,val_uop,val_pop,val_spop,val_pp,val_2uop,rank_pp,mc_true_mean,mc_true_stderr");
  EXPECT_EQ(rows[1].substr(0, 4), "0.5,");
}

TEST_F(CliTest, SweepNonnegativeDInstance) {
  const std::string inst = write("psd.json", R"({"schema_version": "1", "n": 2,
    "reduced": {"Q": [[0.0625, 0, -0.25, 0], [0, 0.0625, 0, -0.25], [-0.25, 0, 1, 0], [0, -0.25, 0, 1]]},
    "hypothesis": {"scaled_identity": 1}, "prior": {"n": 2}})");
  lqp::cli::SweepOptions opt;
  opt.instance_path = inst;
  opt.steps = 11;
  opt.eps_hi = 2.0;
  opt.out_path = path("psd.csv");
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_sweep(opt, err), 0) << err.str();
  const auto dc = lqp::derive_coefficients(lqp::load_instance(inst).qf,
                                           lqp::EllipsoidalHypothesis::from_matrix(lqp::Matrix::Identity(2, 2)));
  const auto rows = lines(read(opt.out_path));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].back(), '0');
    std::stringstream ss(rows[i]);
    std::vector<double> v;
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    const double eps = v[0];
    EXPECT_NEAR(v[4], dc.c + dc.lambda_bar * eps * eps + eps * std::sqrt(dc.f), 1e-9);
  }
}

TEST_F(CliTest, ExampleOnedThresholds) {
  lqp::cli::ExampleOptions opt;
  opt.out_path = path("oned.csv");
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_example(opt, err), 0) << err.str();
  const auto table = lines(read(opt.out_path));
  EXPECT_EQ(table[0], "epsilon,abp_ni,abp_fi,pp_ni,pp_fi,pop_ni,pop_fi");
  EXPECT_EQ(table.size(), 162u);
  const auto th = lines(read(path("oned_thresholds.csv")));
  ASSERT_EQ(th.size(), 5u);
  EXPECT_EQ(th[1], "eps_minus,1.5");
  EXPECT_NEAR(std::stod(th[2].substr(th[2].find(',') + 1)), 1.87997, 5e-6);
  EXPECT_NEAR(std::stod(th[3].substr(th[3].find(',') + 1)), 5.35619, 5e-6);
}

TEST_F(CliTest, ExampleOpeningMatchesOnedAtNEqualsOne) {
  EXPECT_EQ(run("example --which oned --k 2"), 0);
  const std::string oned = read(path("stdout.txt"));
  EXPECT_EQ(run("example --which opening --k 2 --n 1"), 0);
  EXPECT_EQ(read(path("stdout.txt")), oned);
  EXPECT_FALSE(oned.empty());
}

TEST_F(CliTest, ExampleRadiusScan) {
  lqp::cli::ExampleOptions opt;
  opt.which = "opening";
  opt.n = 3;
  opt.radius_eps = 10.0;
  opt.radius_steps = 50;
  opt.out_path = path("open.csv");
  std::stringstream err;
  ASSERT_EQ(lqp::cli::cmd_example(opt, err), 0) << err.str();
  const auto rows = lines(read(path("open_radius.csv")));
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], "R,cost,linear_best");
  EXPECT_EQ(rows[1].substr(rows[1].rfind(',') + 1), "112");
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("solve --instance " + kNumerical + " --program bp"), 0);
  EXPECT_EQ(run("solve --instance " + path("missing.json")), 2);
  write("broken.json", "{ \"n\": ");
  EXPECT_EQ(run("solve --instance " + path("broken.json")), 2);
  EXPECT_NE(read(path("stderr.txt")).find("broken.json:"), std::string::npos);
  EXPECT_EQ(run("solve --instance " + kNumerical + " --program nope"), 2);
  EXPECT_EQ(run("solve --instance " + kNumerical + " --rho -1"), 2);
  EXPECT_EQ(run("example --which oned --k 0.5"), 2);
  EXPECT_EQ(run("example --which opening --k 1"), 2);
  EXPECT_EQ(run("sweep --instance " + kNumerical + " --eps-lo 2 --eps-hi 1"), 2);
  EXPECT_EQ(run("bogus-command"), 2);
}

TEST_F(CliTest, ByteIdenticalReruns) {
  const std::string args = "sweep --instance " + kNumerical + " --steps 25 --mc-samples 500 --out ";
  EXPECT_EQ(run(args + path("a.csv")), 0);
  EXPECT_EQ(run(args + path("b.csv") + " --workers 3"), 0);
  EXPECT_EQ(read(path("a.csv")), read(path("b.csv")));
}

}  // namespace
