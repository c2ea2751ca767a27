#include <benchmark/benchmark.h>

#include "sep/ensembles/measure.hpp"
#include "sep/metrics/estimators.hpp"
#include "sep/oracle/generator.hpp"
#include "sep/oracle/uniformization.hpp"

namespace {

using namespace sep;

void farm_args(benchmark::internal::Benchmark* b) {
  b->Args({256, 0})->Args({256, 1})->Args({1024, 0})->Args({1024, 1});
  b->ArgNames({"L", "parallel"});
  b->Unit(benchmark::kMillisecond);
}

void BM_ReplicaFarm(benchmark::State& state) {
  const TorusLattice lattice(1, static_cast<int>(state.range(0)));
  const auto diff = ensembles::make_diff_law(ensembles::make_bernoulli(0.5));
  const double times[] = {1.0, 4.0, 16.0};
  metrics::FarmOptions farm;
  farm.serial = state.range(1) == 0;
  for (auto _ : state) {
    auto s = metrics::estimate_discrepancy_density(diff, lattice, times, 16, 7, dynamics::Engine::stirring, farm);
    benchmark::DoNotOptimize(s.estimate.data());
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_ReplicaFarm)->Apply(farm_args);

void BM_Uniformization(benchmark::State& state) {
  const TorusLattice lattice(1, static_cast<int>(state.range(0)));
  const auto gen = oracle::build_generator(dynamics::Process::sep, lattice);
  const auto d0 = oracle::point_mass(gen.space.size(), 3);
  const bool parallel = state.range(1) != 0;
  for (auto _ : state) {
    auto d = parallel ? oracle::evolve_exact(gen.Q, d0, 2.0) : oracle::evolve_exact_serial(gen.Q, d0, 2.0);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_Uniformization)
    ->Args({12, 0})
    ->Args({12, 1})
    ->Args({16, 0})
    ->Args({16, 1})
    ->ArgNames({"sites", "parallel"})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
