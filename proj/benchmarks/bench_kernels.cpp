#include <benchmark/benchmark.h>

#include <random>

#include "cparls/dense_kernels.hpp"
#include "cparls/krp_sampler.hpp"
#include "cparls/synth.hpp"

using namespace cparls;

namespace {

const SynthResult& instance() {
  static const SynthResult res = [] {
    SynthSpec spec;
    spec.shape = {60, 60, 60};
    spec.rank = 10;
    spec.seed = 1;
    SynthResult r = gen_synthetic(spec);
    r.tensor.precompute_mode_linearization();
    return r;
  }();
  return res;
}

std::vector<Matrix> factors() {
  const auto& truth = instance().truth;
  return truth.factors;
}

void BM_LeverageScores(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Matrix a = Matrix::NullaryExpr(state.range(0), 25, [&] { return g(rng); });
  for (auto _ : state) benchmark::DoNotOptimize(leverage_scores(a));
}
BENCHMARK(BM_LeverageScores)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Mttkrp(benchmark::State& state) {
  const auto f = factors();
  for (auto _ : state) benchmark::DoNotOptimize(mttkrp(instance().tensor, f, 0));
  state.counters["nnz"] = static_cast<double>(instance().tensor.nnz());
}
BENCHMARK(BM_Mttkrp)->Unit(benchmark::kMillisecond);

void BM_SkrpLev(benchmark::State& state) {
  const auto f = factors();
  ModeDistribution d1 = ModeDistribution::from_factor(f[1]), d2 = ModeDistribution::from_factor(f[2]);
  const DistributionRefs refs{&d1, &d2};
  const auto s = static_cast<std::size_t>(state.range(0));
  SketchOptions opts;
  opts.tau = state.range(1) ? 1.0 / static_cast<double>(s) : 1.0;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(skrp_lev(refs, s, opts, rng));
}
BENCHMARK(BM_SkrpLev)->ArgsProduct({{1 << 10, 1 << 14}, {0, 1}})->ArgNames({"s", "hybrid"});

void BM_SampledSolve(benchmark::State& state) {
  const auto f = factors();
  const auto& t = instance().tensor;
  ModeDistribution d1 = ModeDistribution::from_factor(f[1]), d2 = ModeDistribution::from_factor(f[2]);
  const DistributionRefs refs{&d1, &d2};
  const auto s = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const SketchPlan plan = skrp_lev(refs, s, SketchOptions{}, rng);
  const auto shape = t.other_modes_shape(0);
  std::vector<LinearIndex> lin(plan.size());
  for (std::size_t j = 0; j < plan.size(); ++j) lin[j] = to_linear(plan.idx[j], shape);
  for (auto _ : state) {
    Matrix zs = krp_samp(factor_refs(f, 0), plan.idx, plan.wgt);
    SampledRows xs = tnsr_samp(t, 0, lin, plan.wgt);
    benchmark::DoNotOptimize(solve_lsq(zs, xs));
  }
}
BENCHMARK(BM_SampledSolve)->Arg(1 << 10)->Arg(1 << 13);

}  // namespace

BENCHMARK_MAIN();
