#include <benchmark/benchmark.h>

#include "nlb/dp_approx.hpp"
#include "nlb/fair_rounding.hpp"
#include "nlb/online.hpp"
#include "nlb/scenario.hpp"

namespace {

nlb::CurtailmentInstance scenario(int nodes, int intervals, std::optional<double> alpha = std::nullopt) {
  nlb::ScenarioSpec spec;
  spec.seed = 7007;
  spec.nodes = nodes;
  spec.intervals = intervals;
  spec.alpha = alpha;
  return nlb::generate(spec);
}

// Runtime against the node count at N=6, T=8.
void BM_ApproximationScheme(benchmark::State& state) {
  const auto instance = scenario(static_cast<int>(state.range(0)), 8);
  const double eps = state.range(1) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(nlb::solve_mcnlb(instance, eps));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApproximationScheme)
    ->ArgsProduct({{10, 20, 30, 40, 60}, {20}})
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNSquared);

void BM_EpsilonSweep(benchmark::State& state) {
  const auto instance = scenario(20, 8);
  const double eps = state.range(0) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(nlb::solve_mcnlb(instance, eps));
}
BENCHMARK(BM_EpsilonSweep)->Arg(50)->Arg(20)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_FairRounding(benchmark::State& state) {
  const auto instance = scenario(static_cast<int>(state.range(0)), 8, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(nlb::solve_fair(instance));
}
BENCHMARK(BM_FairRounding)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_OnlineStep(benchmark::State& state) {
  const auto instance = scenario(static_cast<int>(state.range(0)), 4, 0.05);
  const auto context = nlb::context_from_instance(instance);
  const auto step = nlb::step_from_instance(instance, 0);
  for (auto _ : state) benchmark::DoNotOptimize(nlb::solve_online(context, step));
}
BENCHMARK(BM_OnlineStep)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
