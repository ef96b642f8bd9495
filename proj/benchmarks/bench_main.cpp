#include <random>

#include <benchmark/benchmark.h>

#include "lqp/innermax.hpp"
#include "lqp/instance.hpp"
#include "lqp/programs.hpp"

namespace {

using lqp::Matrix;
using lqp::Vector;

lqp::DerivedCoefficients numerical_dc(double eps) {
  lqp::QuadraticForm qf;
  qf.n = 3;
  qf.Q.resize(6, 6);
  qf.Q << 31, -33, 51, -5, 2, -3,
      -33, 67, -80, 4, -9, 6,
      51, -80, 112, -7, 8, -11,
      -5, 4, -7, 1, 0, 0,
      2, -9, 8, 0, 2, 0,
      -3, 6, -11, 0, 0, 4;
  qf.l = Vector::Zero(6);
  return lqp::derive_coefficients(qf, lqp::EllipsoidalHypothesis::scaled(Matrix::Identity(3, 3), eps));
}

Matrix random_psd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  return A.transpose() * A;
}

void BM_EigSym(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Matrix A = random_psd(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(lqp::eig_sym(A));
}
BENCHMARK(BM_EigSym)->Arg(3)->Arg(10)->Arg(50);

void BM_HEq(benchmark::State& state) {
  const auto dc = numerical_dc(1.0);
  const double t = 0.25 * dc.t_bar;
  for (auto _ : state) benchmark::DoNotOptimize(lqp::h_eq(dc.D, dc.E, t));
}
BENCHMARK(BM_HEq);

void BM_WorstCasePenalty(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  const Matrix Q = random_psd(n, rng);
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(lqp::worst_case_penalty({Q, v}));
}
BENCHMARK(BM_WorstCasePenalty)->Arg(3)->Arg(20);

void BM_SolvePp(benchmark::State& state) {
  const auto dc = numerical_dc(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lqp::solve_pp(dc, 1e-4));
}
BENCHMARK(BM_SolvePp);

void BM_SweepNumerical(benchmark::State& state) {
  const auto dc = numerical_dc(1.0);
  const auto ps = lqp::prior_stats({lqp::PriorFamily::Gaussian, 3});
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(2.5 * i / 199.0);
  for (auto _ : state) benchmark::DoNotOptimize(lqp::sweep(dc, ps, grid, 1e-4));
}
BENCHMARK(BM_SweepNumerical)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
