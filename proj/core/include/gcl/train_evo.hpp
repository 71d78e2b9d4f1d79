#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gcl/circuit.hpp"
#include "gcl/rng.hpp"
#include "gcl/sim.hpp"
#include "gcl/targets.hpp"
#include "gcl/train_gd.hpp"

namespace gcl {

struct EvoConfig {
  int population_size = 20;
  double crossover_rate = 0.6;
  // Per-entry mutation probability. Unset means the size-scaled default
  // 0.5 / n^2, i.e. half a mutation per genome per generation on average.
  std::optional<double> mutation_rate;
  double mutation_std = 0.5;
  double elite_fraction = 0.25;
  int max_generations = 5000;
  double init_std = 1.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
  double resolved_mutation_rate(int n) const;
  int survivor_count() const;  // ceil(elite_fraction * population_size)
};

// population_size independent random circuits drawn sequentially from rng.
std::vector<GeneCircuit> init_population(int n, const EvoConfig& cfg,
                                         Rng& rng);

// The survivor_count() lowest-cost individuals, ascending by cost, ties
// broken by original index. Non-finite costs sort last.
std::vector<GeneCircuit> select(const std::vector<GeneCircuit>& population,
                                const std::vector<double>& costs,
                                const EvoConfig& cfg);

// With probability crossover_rate the child takes each entry from a or b by
// an independent fair coin (row-major order); otherwise the child is a copy
// of a. Parents must have equal size.
GeneCircuit crossover(const GeneCircuit& a, const GeneCircuit& b,
                      const EvoConfig& cfg, Rng& rng);

// Each entry independently gains Gaussian noise (std mutation_std) with
// probability resolved_mutation_rate(n), row-major order. Unmutated entries
// are copied bit-identically.
GeneCircuit mutate(const GeneCircuit& circuit, const EvoConfig& cfg, Rng& rng);

// Generational evolutionary search: evaluate, keep the best survivor_count()
// individuals, carry the single best over unchanged, and refill the rest
// with mutated crossovers of uniformly drawn survivor pairs. Stops when the
// best individual's response passes is_success or max_generations is spent.
// loss_history records the best (regularized) cost of each generation and is
// nonincreasing because the elite is never mutated.
TrainResult evolve(int n, const TargetSpec& target, const SimConfig& sim,
                   const EvoConfig& cfg, const LossConfig& loss);

}  // namespace gcl
