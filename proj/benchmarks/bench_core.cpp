#include <benchmark/benchmark.h>

#include "cst/random.hpp"
#include "cst/scattering.hpp"
#include "cst/spectral.hpp"
#include "cst/synthdata.hpp"

namespace {

cst::SynthDataset dataset(int N, int T) {
  cst::SynthSpec spec;
  spec.N = N;
  spec.T = T;
  spec.tail = 0.5;
  spec.seed = 1;
  return cst::synth_generate(spec);
}

void BM_EigSym(benchmark::State& state) {
  const auto n = state.range(0);
  cst::Rng rng = cst::make_rng(1, "bench.eig");
  const Eigen::MatrixXd a = cst::standard_normal(rng, n, n);
  const Eigen::MatrixXd c = a * a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(cst::eig_sym(c));
}
BENCHMARK(BM_EigSym)->Arg(16)->Arg(64)->Arg(128);

void BM_CstFit(benchmark::State& state) {
  const auto ds = dataset(static_cast<int>(state.range(0)), 500);
  const auto cov = cst::sample_covariance(ds.data);
  cst::CstConfig config;
  config.J = 5;
  config.L = 3;
  for (auto _ : state) benchmark::DoNotOptimize(cst::cst_fit(cov, config));
}
BENCHMARK(BM_CstFit)->Arg(20)->Arg(64);

void BM_TransformBatch(benchmark::State& state) {
  const auto ds = dataset(20, 1000);
  cst::CstConfig config;
  config.J = static_cast<int>(state.range(0));
  config.L = 3;
  const auto model = cst::cst_fit(cst::sample_covariance(ds.data), config);
  const double tau = static_cast<double>(state.range(1)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(cst::cst_transform_batch(model, ds.data.values, tau));
  state.SetItemsProcessed(state.iterations() * ds.data.samples());
}
BENCHMARK(BM_TransformBatch)->Args({4, 0})->Args({4, 20})->Args({7, 0});

}  // namespace

BENCHMARK_MAIN();
