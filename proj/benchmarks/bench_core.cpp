#include <benchmark/benchmark.h>

#include "shb/quad_analysis.hpp"
#include "shb/rng.hpp"
#include "shb/shb.hpp"

using namespace shb;

static void BM_RngGaussian(benchmark::State& state) {
  RngStream rng(1, 0);
  double acc = 0.0;
  for (auto _ : state) acc += rng.gaussian();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngGaussian);

static void BM_ShbStepQuadratic1d(benchmark::State& state) {
  const Potential pot = make_quadratic(Matrix(1, {1.0}));
  StepSchedule sched(2.0, 1.0);
  auto mem = MemorySchedule::exponential(8.0);
  auto noise = NoiseModel::isotropic_gaussian(1.0);
  RngStream rng(1, 0);
  StepWorkspace ws(1);
  ShbState st = ShbState::init(Vec{1.0});
  for (auto _ : state) {
    shb_step_inplace(st, pot, sched, mem, noise, rng, ws);
    if (st.n > 1000000000) st = ShbState::init(Vec{1.0});
  }
  benchmark::DoNotOptimize(st.x[0]);
}
BENCHMARK(BM_ShbStepQuadratic1d);

static void BM_ShbStepQuadratic2d(benchmark::State& state) {
  const Potential pot = make_quadratic(Matrix(2, {2.0, 1.0, 1.0, 2.0}));
  StepSchedule sched(1.0, 1.0);
  auto mem = MemorySchedule::polynomial(3.0);
  auto noise = NoiseModel::isotropic_gaussian(1.0);
  RngStream rng(1, 0);
  StepWorkspace ws(2);
  ShbState st = ShbState::init(Vec{1.0, -1.0});
  for (auto _ : state) {
    shb_step_inplace(st, pot, sched, mem, noise, rng, ws);
    if (st.n > 1000000000) st = ShbState::init(Vec{1.0, -1.0});
  }
  benchmark::DoNotOptimize(st.x[0]);
}
BENCHMARK(BM_ShbStepQuadratic2d);

static void BM_JacobiEigen(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(3, 0);
  Matrix S(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) S(i, j) = S(j, i) = 2.0 * rng.uniform() - 1.0;
  for (auto _ : state) {
    auto e = jacobi_eigen(S);
    benchmark::DoNotOptimize(e.eigenvalues[0]);
  }
}
BENCHMARK(BM_JacobiEigen)->Arg(2)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
