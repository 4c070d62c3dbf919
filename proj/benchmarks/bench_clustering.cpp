#include <benchmark/benchmark.h>

#include "croc/clustering.hpp"
#include "croc/rng.hpp"
#include "croc/segeval.hpp"
#include "croc/synth.hpp"

namespace {

void ClusteringRun(benchmark::State& state) {
  croc::SynthSpec spec;
  spec.blobs = 4;
  spec.n_per_view = static_cast<int>(state.range(0));
  spec.dim = 16;
  spec.separation = 20.0;
  const croc::ViewPair vp = croc::to_view_pair(croc::make_synth(spec));
  croc::ClusteringConfig cfg;
  cfg.k_start = 12;
  for (auto _ : state) {
    const croc::ClusteringResult result = croc::run_clustering(vp, cfg);
    benchmark::DoNotOptimize(result.k_selected);
  }
  state.SetComplexityN(state.range(0));
}

void HungarianSolve(benchmark::State& state) {
  const croc::Index n = state.range(0);
  croc::Rng rng(7);
  croc::Matrix cost(n, n);
  for (croc::Index i = 0; i < n; ++i) {
    for (croc::Index j = 0; j < n; ++j) {
      cost(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(croc::hungarian(cost));
  }
  state.SetComplexityN(n);
}

void KMeansRun(benchmark::State& state) {
  const croc::Index m = state.range(0);
  croc::Rng rng(11);
  croc::Matrix points(m, 8);
  for (croc::Index i = 0; i < m; ++i) {
    for (croc::Index j = 0; j < 8; ++j) {
      points(i, j) = rng.gaussian();
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(croc::kmeans(points, 8, 1));
  }
  state.SetComplexityN(m);
}

}  // namespace

BENCHMARK(ClusteringRun)->Arg(64)->Arg(196)->Unit(benchmark::kMillisecond);
BENCHMARK(HungarianSolve)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(KMeansRun)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
