#include <benchmark/benchmark.h>

#include <random>

#include "kinkfold/dynamics.hpp"
#include "kinkfold/soliton.hpp"

using namespace kinkfold;

namespace {

AngleProfile helix(std::size_t vertices) {
  AngleProfile p;
  p.kappa.assign(vertices - 2, 1.57);
  p.tau.assign(vertices - 3, 0.87);
  p.bond_lengths = canonical_bond_lengths(vertices);
  return p;
}

void BM_Reconstruct(benchmark::State& state) {
  const AngleProfile p = helix(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Reconstruct)->Arg(32)->Arg(128)->Arg(512);

void BM_ComputeAngles(benchmark::State& state) {
  const CalphaChain c = reconstruct(helix(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_angles(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeAngles)->Arg(32)->Arg(128)->Arg(512);

void BM_Relax(benchmark::State& state) {
  const EnergyParams p{1.0, 1.0, 0.0, 0.0, 1.0, 0.0};
  std::vector<double> start(state.range(0));
  for (std::size_t i = 0; i < start.size(); ++i) start[i] = 2.0 * i / (start.size() - 1.0) - 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(relax(start, p, {0.01, 1'000'000, 1e-8, 0}));
}
BENCHMARK(BM_Relax)->Arg(51)->Unit(benchmark::kMillisecond);

void BM_McStep(benchmark::State& state) {
  const EnergyParams p{2.0, 1.57, 0.87, 0.0, 1.0, 0.0};
  McState mc(helix(state.range(0)), p);
  MCConfig c;
  c.sigma_kappa = 0.1;
  c.sigma_tau = 0.3;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(mc.step(1.0, c, rng));
  state.counters["acceptance"] = static_cast<double>(mc.accepted()) / mc.proposed();
}
BENCHMARK(BM_McStep)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
