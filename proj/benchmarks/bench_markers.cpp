#include <benchmark/benchmark.h>

#include "rokdim/markers.hpp"
#include "rokdim/towers.hpp"

using namespace rokdim;

static void BM_BuildControlledMarker(benchmark::State& state) {
  SampledSystem sys = make_cyclic({static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(build_controlled_marker(sys, 4, 0));
}
BENCHMARK(BM_BuildControlledMarker)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_BuildControlledMarkerGrid(benchmark::State& state) {
  SampledSystem sys = make_cyclic({32, 32});
  for (auto _ : state)
    benchmark::DoNotOptimize(build_controlled_marker(sys, static_cast<int>(state.range(0)), 0));
}
BENCHMARK(BM_BuildControlledMarkerGrid)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_VerifyRelations(benchmark::State& state) {
  SampledSystem sys = make_cyclic({static_cast<int>(state.range(0))});
  TowerFamily fam = exact_tiling_family(sys, {static_cast<int>(state.range(0))}, 32);
  for (auto _ : state) benchmark::DoNotOptimize(verify_def_relations(sys, fam));
}
BENCHMARK(BM_VerifyRelations)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
