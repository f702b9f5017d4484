#include <benchmark/benchmark.h>

#include "lstarf/instance.hpp"
#include "lstarf/linalg.hpp"
#include "lstarf/random.hpp"
#include "lstarf/ripest.hpp"
#include "lstarf/solve.hpp"

using namespace lstarf;

static void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const DenseMatrix a = gaussian_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(svd(a));
}
BENCHMARK(BM_Svd)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

static void BM_SvtProx(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const DenseMatrix a = gaussian_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(svt_prox(a, 0.5));
}
BENCHMARK(BM_SvtProx)->Arg(8)->Arg(16)->Arg(32);

static void BM_OperatorNormal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto op = measure::build_operator(measure::OperatorKind::Gaussian, n, n, n * n / 2, 3);
  Rng rng(3);
  const DenseMatrix x = gaussian_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(op.normal(x));
}
BENCHMARK(BM_OperatorNormal)->Arg(8)->Arg(16)->Arg(24);

static void BM_DcaSolve(benchmark::State& state) {
  const std::size_t n = 10;
  const auto op = measure::build_operator(measure::OperatorKind::Gaussian, n, n, 60, 4);
  Rng rng(4);
  const auto inst = measure::make_instance(op, random_unit_low_rank(n, n, 2, rng),
                                           measure::NoiseKind::None, 0.0, 4);
  solve::SolverConfig cfg;
  cfg.max_outer = 20;
  for (auto _ : state) benchmark::DoNotOptimize(solve::dca_solve(inst, 1e-2, cfg));
}
BENCHMARK(BM_DcaSolve)->Unit(benchmark::kMillisecond);

static void BM_RipEstimate(benchmark::State& state) {
  const auto op = measure::build_operator(measure::OperatorKind::Gaussian, 6, 6, 72, 5);
  rip::EstimatorOptions o;
  o.restarts = 8;
  for (auto _ : state) benchmark::DoNotOptimize(rip::estimate_delta(op, 1, o));
}
BENCHMARK(BM_RipEstimate)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
