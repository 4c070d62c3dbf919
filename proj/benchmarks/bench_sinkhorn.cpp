#include <benchmark/benchmark.h>

#include "croc/rng.hpp"
#include "croc/sinkhorn.hpp"

namespace {

using croc::Index;
using croc::Matrix;
using croc::Vector;

struct Instance {
  Matrix cost;
  Vector r;
  Vector c;
};

Instance make_instance(Index n, Index k, std::uint64_t seed) {
  croc::Rng rng(seed);
  Instance inst;
  inst.cost = Matrix(n, k);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) {
      inst.cost(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  inst.r = Vector(n);
  inst.c = Vector(k);
  for (Index i = 0; i < n; ++i) {
    inst.r[i] = rng.uniform(0.1, 1.0);
  }
  for (Index j = 0; j < k; ++j) {
    inst.c[j] = rng.uniform(0.1, 1.0);
  }
  inst.r /= inst.r.sum();
  inst.c /= inst.c.sum();
  return inst;
}

void SinkhornSolve(benchmark::State& state) {
  const Index n = state.range(0);
  const double lambda = static_cast<double>(state.range(1));
  const Instance inst = make_instance(n, 12, 42);
  const croc::MarginalPair marginals(inst.r, inst.c);
  for (auto _ : state) {
    const croc::TransportPlan plan =
        croc::sinkhorn_solve(inst.cost, marginals, lambda);
    benchmark::DoNotOptimize(plan.cost);
  }
  state.SetComplexityN(n);
}

}  // namespace

BENCHMARK(SinkhornSolve)
    ->ArgsProduct({{32, 128, 512}, {1, 20, 100}})
    ->Unit(benchmark::kMicrosecond);
