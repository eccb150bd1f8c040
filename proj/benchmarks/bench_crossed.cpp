#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rokdim/crossed.hpp"

using namespace rokdim;

namespace {

BandOperator sample_op(const SampledSystem& sys) {
  CoefFn a(sys.size()), b(sys.size());
  for (std::size_t p = 0; p < sys.size(); ++p) {
    a[p] = Cplx(0.3 + 0.5 * static_cast<double>(p % 7) / 7.0, 0.1);
    b[p] = Cplx(0.2, 0.4 * static_cast<double>(p % 5) / 5.0);
  }
  BandOperator op = band_term(1, Vec({1}), a);
  band_accumulate(op, Vec({-2}), b);
  return op;
}

// dense reference for the same compression, SVD through Eigen
double dense_norm(const SampledSystem& sys, const BandOperator& op, int base_n) {
  const int bw = static_cast<int>(op.bandwidth());
  JWindow pad(base_n + 3 * bw + 1, sys.rank());
  JWindow support(base_n + bw, sys.rank());
  const std::size_t P = sys.size();
  const Eigen::Index D = static_cast<Eigen::Index>(pad.size() * P);
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(D, D);
  for (std::size_t wi = 0; wi < pad.size(); ++wi) {
    Vec w = pad.element(wi);
    for (const auto& [v, a] : op.terms) {
      Vec src = w - v;
      if (!pad.contains(src)) continue;
      std::size_t si = pad.index(src);
      for (std::size_t p = 0; p < P; ++p)
        mat(static_cast<Eigen::Index>(wi * P + p), static_cast<Eigen::Index>(si * P + p)) +=
            a[sys.act(w, static_cast<std::uint32_t>(p))];
    }
  }
  for (std::size_t wi = 0; wi < pad.size(); ++wi) {
    if (support.contains(pad.element(wi))) continue;
    for (std::size_t p = 0; p < P; ++p)
      mat.col(static_cast<Eigen::Index>(wi * P + p)).setZero();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
  return svd.singularValues()(0);
}

} // namespace

static void BM_EstimateNormMatrixFree(benchmark::State& state) {
  SampledSystem sys = make_cyclic({static_cast<int>(state.range(0))});
  BandOperator op = sample_op(sys);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_norm(sys, op, 4));
}
BENCHMARK(BM_EstimateNormMatrixFree)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EstimateNormDense(benchmark::State& state) {
  SampledSystem sys = make_cyclic({static_cast<int>(state.range(0))});
  BandOperator op = sample_op(sys);
  for (auto _ : state) benchmark::DoNotOptimize(dense_norm(sys, op, 4));
}
BENCHMARK(BM_EstimateNormDense)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_CompressPsi(benchmark::State& state) {
  SampledSystem sys = make_cyclic({128});
  BandOperator op = sample_op(sys);
  for (auto _ : state)
    benchmark::DoNotOptimize(compress_psi(sys, op, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CompressPsi)->Arg(4)->Arg(16);

static void BM_PipelineDefect(benchmark::State& state) {
  SampledSystem sys = make_cyclic({128});
  const int n = static_cast<int>(state.range(0));
  TowerFamily fam = exact_tiling_family(sys, {128}, 2 * n);
  std::vector<PipelineTestOp> ops = {{"unit", Vec({1}), CoefFn(128, Cplx(1, 0))}};
  for (auto _ : state) benchmark::DoNotOptimize(pipeline_defect(sys, fam, n, 1, ops));
}
BENCHMARK(BM_PipelineDefect)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
