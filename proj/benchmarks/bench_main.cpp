#include <benchmark/benchmark.h>

#include "ringrep/analytics.hpp"
#include "ringrep/mc.hpp"
#include "ringrep/optimizer.hpp"
#include "ringrep/ring_code.hpp"

using namespace ringrep;

static void BM_ConcatFusion(benchmark::State& st) {
  const int depth = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(concat_fusion_distribution(0.8, depth));
}
BENCHMARK(BM_ConcatFusion)->DenseRange(1, 7, 2);

static void BM_FtFusionStats(benchmark::State& st) {
  const int depth = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(ft_fusion_stats(0.9, 1e-3, depth, depth / 2 + 1));
}
BENCHMARK(BM_FtFusionStats)->Arg(2)->Arg(4)->Arg(8);

static void BM_CodeState(benchmark::State& st) {
  const int depth = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(code_state({4, depth, depth}));
}
BENCHMARK(BM_CodeState)->DenseRange(1, 3);

static void BM_FusionTrials(benchmark::State& st) {
  TrialConfig cfg;
  cfg.spec = {4, static_cast<int>(st.range(0)), static_cast<int>(st.range(0))};
  cfg.eta = 0.9;
  cfg.lambda = 0.01;
  cfg.trials = 2048;
  cfg.threads = 1;
  for (auto _ : st) benchmark::DoNotOptimize(simulate_logical_fusion(cfg));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(cfg.trials));
}
BENCHMARK(BM_FusionTrials)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_Optimize(benchmark::State& st) {
  const double L = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(optimize(L, 1.5e-3, TimingParams{1, 10, 10}, SearchBounds{}));
}
BENCHMARK(BM_Optimize)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
