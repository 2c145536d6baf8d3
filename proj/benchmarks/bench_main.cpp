#include <benchmark/benchmark.h>

#include "dmatch/bounds.hpp"
#include "dmatch/experiments.hpp"
#include "dmatch/lpalg.hpp"
#include "dmatch/matching.hpp"
#include "dmatch/omniscient.hpp"
#include "dmatch/rng.hpp"
#include "dmatch/simulate.hpp"

using namespace dmatch;

static void BM_SuitabilityFinder(benchmark::State& state) {
  const Instance inst = random_instance(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(suitability_finder(inst).history.size());
}
BENCHMARK(BM_SuitabilityFinder)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_LpOff(benchmark::State& state) {
  const Instance inst = random_instance(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(lp_off(inst).value);
}
BENCHMARK(BM_LpOff)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  const Instance inst = random_instance(static_cast<std::size_t>(state.range(0)), 3);
  const GreedyPolicy p = extract_prefix_policy(suitability_finder(inst).report);
  SimOptions opts;
  opts.horizon = 2e4;
  opts.burn_in = 2e3;
  std::size_t events = 0;
  for (auto _ : state) {
    const SimStats s = simulate(inst, p, opts);
    events += s.total_arrivals;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_Simulate)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_OverlapMatching(benchmark::State& state) {
  const Instance inst = random_instance(6, 3);
  const Trace t = sample_trace(inst, static_cast<double>(state.range(0)), 1);
  const OverlapGraph g = build_overlap_graph(t, inst);
  for (auto _ : state) benchmark::DoNotOptimize(max_weight_matching(g).total_weight);
  state.counters["vertices"] = static_cast<double>(g.num_vertices);
  state.counters["edges"] = static_cast<double>(g.edges.size());
}
BENCHMARK(BM_OverlapMatching)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_BlossomDense(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  CounterRng rng(1, 2);
  std::vector<WeightedEdge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) edges.push_back({u, v, rng.uniform()});
  for (auto _ : state) benchmark::DoNotOptimize(max_weight_matching(n, edges).total_weight);
}
BENCHMARK(BM_BlossomDense)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
