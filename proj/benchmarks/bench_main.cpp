#include <benchmark/benchmark.h>

#include "twistorlab/flag.hpp"
#include "twistorlab/twistor.hpp"

using namespace twistorlab;

static void BM_LeviCivita(benchmark::State& state) {
  const auto M = builtin(Builtin::Hopf);
  const Vec4 x(1.1, 0.1, -0.2, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(levi_civita(M, x));
}
BENCHMARK(BM_LeviCivita);

static void BM_CoframeMatrix(benchmark::State& state) {
  const auto M = builtin(Builtin::CP2);
  const TwistorChart chart(M);
  const Vec6 p = sample_twistor_points(M, 1, 1)[0];
  const auto conn = state.range(0) ? ConnectionChoice::chern() : ConnectionChoice::lichnerowicz();
  for (auto _ : state) benchmark::DoNotOptimize(coframe_matrix(chart, conn, p));
}
BENCHMARK(BM_CoframeMatrix)->Arg(0)->Arg(1);

static void BM_TwistorCoframe(benchmark::State& state) {
  const auto M = builtin(Builtin::Hopf);
  const TwistorChart chart(M);
  const Vec6 p = sample_twistor_points(M, 1, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(twistor_coframe(chart, ConnectionChoice::chern(), p));
}
BENCHMARK(BM_TwistorCoframe);

static void BM_DkOracle(benchmark::State& state) {
  const auto M = builtin(Builtin::CP2);
  const TwistorChart chart(M);
  const Vec6 p = sample_twistor_points(M, 1, 1)[0];
  const auto jet = coframe_jet(chart, ConnectionChoice::lichnerowicz(), p);
  for (auto _ : state) benchmark::DoNotOptimize(dK_oracle(1, Lambdas::single(1.0), jet));
}
BENCHMARK(BM_DkOracle);

static void BM_CoframeJet(benchmark::State& state) {
  const auto M = builtin(Builtin::CP2);
  const TwistorChart chart(M);
  const Vec6 p = sample_twistor_points(M, 1, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(coframe_jet(chart, ConnectionChoice::lichnerowicz(), p));
}
BENCHMARK(BM_CoframeJet);

static void BM_FlagStructuralD(benchmark::State& state) {
  const auto K = flag_kahler(1, {1.0, 2.0, 3.0});
  for (auto _ : state) benchmark::DoNotOptimize(structural_d(K));
}
BENCHMARK(BM_FlagStructuralD);

static void BM_Wedge(benchmark::State& state) {
  const auto K = flag_kahler(2, {1.0, 1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(wedge(K, K));
}
BENCHMARK(BM_Wedge);
BENCHMARK_MAIN();
