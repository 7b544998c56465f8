#include <benchmark/benchmark.h>

#include "mfgp/design.hpp"
#include "mfgp/gp.hpp"
#include "mfgp/multilevel.hpp"
#include "mfgp/random.hpp"
#include "mfgp/testfunctions.hpp"

namespace {

using namespace mfgp;

LevelData example1_level(TestFunctionId id, std::size_t n, std::uint64_t key) {
  Rng rng = Rng::stream(7, {key});
  LevelData d;
  d.X = lhs_sample(n, 2, rng);
  d.y = eval_testfn(id, d.X);
  return d;
}

MultiLevelData example1_data(std::size_t n2) {
  auto l1 = example1_level(TestFunctionId::Ex1L1, 20, 1);
  auto l2 = example1_level(TestFunctionId::Ex1L2, n2, 2);
  return MultiLevelData::from_levels({l1, l2});
}

void BM_FitGP(benchmark::State& state) {
  const auto data = example1_level(TestFunctionId::Ex1L2, static_cast<std::size_t>(state.range(0)), 3);
  OptimizerConfig opt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_gp(data, MeanSpec{}, KernelSpec{}, opt).log_lik());
  }
}
BENCHMARK(BM_FitGP)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FitBayHEm(benchmark::State& state) {
  const auto data = example1_data(static_cast<std::size_t>(state.range(0)));
  BayHEmOptions options;
  options.mode = state.range(1) ? BayHEmMode::PerLevelTheta : BayHEmMode::SharedTheta;
  OptimizerConfig opt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_bayhem(data, options, MeanSpec{}, KernelSpec{}, opt).log_lik());
  }
}
BENCHMARK(BM_FitBayHEm)->Args({5, 0})->Args({20, 0})->Args({20, 1})->Unit(benchmark::kMillisecond);

void BM_FitKO(benchmark::State& state) {
  const auto data = example1_data(10);
  OptimizerConfig opt;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_ko(data, RhoSpec{}, MeanSpec{}, KernelSpec{}, opt).log_lik());
  }
}
BENCHMARK(BM_FitKO)->Unit(benchmark::kMillisecond);

// Prediction cost on the 10000-point test set used by the tables.
void BM_PredictBayHEm(benchmark::State& state) {
  const auto model = fit_bayhem(example1_data(10), {}, MeanSpec{}, KernelSpec{}, {});
  Rng rng(2);
  const DesignMatrix X = lhs_sample(static_cast<std::size_t>(state.range(0)), 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(X).mean.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictBayHEm)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
