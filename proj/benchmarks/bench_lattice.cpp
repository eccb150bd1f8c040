#include <benchmark/benchmark.h>

#include "rokdim/lattice.hpp"

using namespace rokdim;

static void BM_PartitionWeights(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = 8;
  auto window = enum_box(BoxKind::J, n, m);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_weights(n, window[i]));
    i = (i + 1) % window.size();
  }
}
BENCHMARK(BM_PartitionWeights)->Arg(1)->Arg(2)->Arg(3);

static void BM_EnumBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enum_box(BoxKind::J, n, 2));
}
BENCHMARK(BM_EnumBox)->Arg(4)->Arg(16);
