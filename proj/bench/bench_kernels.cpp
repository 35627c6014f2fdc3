// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "flatstruct/generators.hpp"
#include "flatstruct/simgraph.hpp"
#include "flatstruct/tasks.hpp"

using namespace flatstruct;

namespace {

const Graph& bench_graph() {
  static const Graph g = erdos_renyi(2000, 6.0, 7);
  return g;
}

const StructuralDistance& bench_distance() {
  static const Graph g = erdos_renyi(800, 6.0, 11);
  static const StructuralDistance sd(g, {degree(g), clustering_coefficient(g)},
                                     {ComparisonSpec{}, ComparisonSpec{}}, WeightConfig::uniform(2, 2));
  return sd;
}

const Features& bench_points() {
  static const Features x = [] {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Features f{32, {}};
    for (int i = 0; i < 3000 * 32; ++i) f.values.push_back(normal(rng));
    return f;
  }();
  return x;
}

void BM_BetweennessSerial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(betweenness_centrality_serial(bench_graph()));
}
void BM_BetweennessParallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(betweenness_centrality(bench_graph()));
}
void BM_DenseSimgraphSerial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(build_dense_serial(bench_distance(), WeightTransform{}));
}
void BM_DenseSimgraphParallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(build_dense(bench_distance(), WeightTransform{}));
}
void BM_AnomalySerial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(anomaly_scores_serial(bench_points(), 5));
}
void BM_AnomalyParallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(anomaly_scores(bench_points(), 5));
}

}  // namespace

BENCHMARK(BM_BetweennessSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetweennessParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DenseSimgraphSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseSimgraphParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AnomalySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnomalyParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
