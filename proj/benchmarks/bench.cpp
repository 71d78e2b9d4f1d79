// Microbenchmarks for the hot paths: settling, the unrolled gradient, the
// eigensolver, and one GA generation. Run with --benchmark_filter=... to
// focus; sizes track the sweep ladder.

#include <benchmark/benchmark.h>

#include "gcl/analysis.hpp"
#include "gcl/experiments.hpp"
#include "gcl/rng.hpp"
#include "gcl/train_evo.hpp"
#include "gcl/train_gd.hpp"

using namespace gcl;

namespace {

GeneCircuit bench_circuit(int n) {
  Rng rng(1234 + static_cast<std::uint64_t>(n));
  return GeneCircuit::random(n, 1.0, rng);
}

void bm_steady_state(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GeneCircuit c = bench_circuit(n);
  const SimConfig cfg;
  for (auto _ : state) {
    const SettleResult s = steady_state(c, 1.0, cfg);
    benchmark::DoNotOptimize(s.state.data());
  }
}

void bm_loss_and_gradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GeneCircuit c = bench_circuit(n);
  const TargetSpec target = TargetSpec::french_flag();
  SimConfig sim;
  sim.max_steps = 100;  // the trainer's unroll depth
  const LossConfig loss;
  for (auto _ : state) {
    const LossAndGrad lg = loss_and_gradient(c, target, sim, loss);
    benchmark::DoNotOptimize(lg.loss);
  }
}

void bm_eigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GeneCircuit c = bench_circuit(n);
  const Matrix J = jacobian(c, Vector::Constant(n, 0.5));
  for (auto _ : state) {
    auto ev = eigenvalues(J);
    benchmark::DoNotOptimize(ev.data());
  }
}

void bm_evolve_generation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TargetSpec target = TargetSpec::french_flag();
  const SimConfig sim;
  const LossConfig loss;
  EvoConfig cfg;
  cfg.max_generations = 1;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.rng_seed = seed++;
    const TrainResult r = evolve(n, target, sim, cfg, loss);
    benchmark::DoNotOptimize(r.loss_history.data());
  }
}

BENCHMARK(bm_steady_state)->Arg(4)->Arg(8)->Arg(18);
BENCHMARK(bm_loss_and_gradient)->Arg(4)->Arg(8)->Arg(18);
BENCHMARK(bm_eigenvalues)->Arg(4)->Arg(18);
BENCHMARK(bm_evolve_generation)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
