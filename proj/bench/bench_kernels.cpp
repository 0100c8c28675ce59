// Serial reference vs OpenMP kernels for the two hot stages.
//
//   ./bench_kernels --benchmark_filter=Knn
//
// Arguments are (n, d) for kNN and (n, classes) for scoring.

#include <benchmark/benchmark.h>

#include "graphcvx/convexity.hpp"
#include "graphcvx/knn_graph.hpp"
#include "graphcvx/oracle.hpp"
#include "graphcvx/rng.hpp"

using namespace graphcvx;

namespace {

EmbeddingMatrix gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  rng::Engine eng(seed);
  EmbeddingMatrix m;
  m.rows = n;
  m.cols = d;
  m.values.resize(n * d);
  for (auto& v : m.values) v = static_cast<float>(rng::normal(eng));
  return m;
}

LabelVector balanced(std::size_t n, std::size_t classes) {
  std::vector<std::int32_t> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<std::int32_t>(i % classes);
  return make_labels(std::move(l));
}

void BM_KnnSerial(benchmark::State& state) {
  const auto m = gaussian(state.range(0), state.range(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_knn_graph_serial(m, kDefaultK));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_KnnParallel(benchmark::State& state) {
  const auto m = gaussian(state.range(0), state.range(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_knn_graph(m, kDefaultK));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_ScoreSerial(benchmark::State& state) {
  const auto m = gaussian(state.range(0), 16, 2);
  const auto labels = balanced(state.range(0), state.range(1));
  const auto g = build_knn_graph(m, kDefaultK);
  for (auto _ : state) benchmark::DoNotOptimize(layer_convexity_serial(g, labels));
}

void BM_ScoreParallel(benchmark::State& state) {
  const auto m = gaussian(state.range(0), 16, 2);
  const auto labels = balanced(state.range(0), state.range(1));
  const auto g = build_knn_graph(m, kDefaultK);
  for (auto _ : state) benchmark::DoNotOptimize(layer_convexity(g, labels));
}

void BM_Oracle(benchmark::State& state) {
  const auto m = gaussian(state.range(0), 8, 3);
  const auto labels = balanced(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::oracle_convexity(m, labels, kDefaultK));
}

}  // namespace

BENCHMARK(BM_KnnSerial)->Args({2000, 64})->Args({2000, 768})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnParallel)->Args({2000, 64})->Args({2000, 768})->Args({10000, 768})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerial)->Args({2000, 10})->Args({5000, 35})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Args({2000, 10})->Args({5000, 35})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Oracle)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
