#include <benchmark/benchmark.h>

#include "archpat/checker.hpp"
#include "archpat/patterns.hpp"

using namespace archpat;

namespace {

// Arg: worker count (1 runs the serial loop, 0 the OpenMP default).
void BM_Reachable(benchmark::State& state, const char* id) {
  const PatternSpec& spec = get_pattern(id).spec;
  const int threads = static_cast<int>(state.range(0));
  std::size_t visited = 0;
  for (auto _ : state) {
    visited = reachable(spec, std::nullopt, threads).states_visited;
    benchmark::DoNotOptimize(visited);
  }
  state.counters["states"] = static_cast<double>(visited);
  state.counters["states/s"] =
      benchmark::Counter(static_cast<double>(visited), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_CheckAll(benchmark::State& state, const char* id) {
  const PatternSpec& spec = get_pattern(id).spec;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto outcomes = check_all(spec, {}, threads);
    benchmark::DoNotOptimize(outcomes.data());
  }
  state.counters["properties"] = static_cast<double>(spec.properties.size());
}

void BM_CheckPropertyLazy(benchmark::State& state) {
  const PatternSpec& spec = get_pattern("mvc").spec;
  for (auto _ : state) {
    Verdict v = check_property(spec, "M1");
    benchmark::DoNotOptimize(v.holds);
  }
}

void BM_ToBuchi(benchmark::State& state) {
  const PatternSpec& spec = get_pattern("broker").spec;
  for (auto _ : state)
    for (const auto& p : spec.properties) {
      BuchiAutomaton a = to_buchi(*p.formula);
      benchmark::DoNotOptimize(a.state_count);
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Reachable, broker, "broker")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Reachable, mvc, "mvc")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CheckAll, broker, "broker")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CheckAll, mvc, "mvc")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_CheckPropertyLazy)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_ToBuchi)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
