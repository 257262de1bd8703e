#include <benchmark/benchmark.h>

#include "gridqr/gridqr.hpp"

using namespace gridqr;

static void BM_HouseholderQr(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const DenseMatrix a = gaussian_matrix(m, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(householder_qr(a));
  state.counters["flop/s"] =
      benchmark::Counter(householder_flops(double(m), double(n)), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_HouseholderQr)->Args({4096, 16})->Args({4096, 64})->Args({16384, 64})->Unit(benchmark::kMillisecond);

static void BM_StackedQr(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseMatrix r1 = gaussian_matrix(n, n, 2).upper_triangle();
  const DenseMatrix r2 = gaussian_matrix(n, n, 3).upper_triangle();
  for (auto _ : state) benchmark::DoNotOptimize(stacked_qr(r1, r2));
  state.counters["flop/s"] =
      benchmark::Counter(stacked_qr_flops(double(n)), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_StackedQr)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_TsqrFactor(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Topology topo = uniform_topology(1, p);
  const ReductionTree tree = build_tree(topo, TreeShape::binary);
  const DenseMatrix a = gaussian_matrix(65536, 32, 4);
  for (auto _ : state) {
    Communicator comm(topo);
    benchmark::DoNotOptimize(tsqr_factor(a, tree, comm));
  }
}
BENCHMARK(BM_TsqrFactor)->Arg(1)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ReconstructQ(benchmark::State& state) {
  const Topology topo = uniform_topology(2, 8);
  Communicator comm(topo);
  const TsqrFactorization f = tsqr_factor(gaussian_matrix(32768, 32, 5), build_tree(topo, TreeShape::hierarchical), comm);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_q(f));
}
BENCHMARK(BM_ReconstructQ)->Unit(benchmark::kMillisecond);

// Counters-only runs at the full 256-domain grid scale.
static void BM_SimulateTsqrGrid(benchmark::State& state) {
  const Topology g = grid5000_topology();
  const ReductionTree tree = build_tree(g, TreeShape::hierarchical);
  for (auto _ : state) {
    Communicator comm(g);
    simulate_tsqr(33554432, 64, tree, comm, state.range(0) != 0);
    benchmark::DoNotOptimize(comm.report());
  }
}
BENCHMARK(BM_SimulateTsqrGrid)->Arg(0)->Arg(1);

static void BM_SimulateQr2Grid(benchmark::State& state) {
  const Topology g = grid5000_topology();
  const ReductionTree tree = build_tree(g, TreeShape::binary);
  for (auto _ : state) {
    Communicator comm(g);
    simulate_qr2(33554432, static_cast<std::size_t>(state.range(0)), tree, comm);
    benchmark::DoNotOptimize(comm.report());
  }
}
BENCHMARK(BM_SimulateQr2Grid)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_CrossoverSearch(benchmark::State& state) {
  const Topology g = grid5000_topology();
  const LevelProfile t = level_profile(g, build_tree(g, TreeShape::hierarchical));
  const LevelProfile q = level_profile(g, build_tree(g, TreeShape::binary));
  for (auto _ : state) benchmark::DoNotOptimize(crossover_n(8388608, 256, t, q));
}
BENCHMARK(BM_CrossoverSearch);

BENCHMARK_MAIN();
