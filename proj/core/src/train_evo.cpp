#include "gcl/train_evo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace gcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Population indices ordered by ascending cost, ties broken by index.
// Non-finite costs (diverged individuals) sort behind everything.
std::vector<int> ranked_indices(const std::vector<double>& costs) {
  std::vector<int> idx(costs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ca = std::isfinite(costs[a]) ? costs[a] : kInf;
    const double cb = std::isfinite(costs[b]) ? costs[b] : kInf;
    return ca < cb;
  });
  return idx;
}

}  // namespace

void EvoConfig::validate() const {
  if (population_size < 2)
    throw std::invalid_argument("EvoConfig: population_size must be >= 2");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw std::invalid_argument("EvoConfig: crossover_rate must be in [0,1]");
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0))
    throw std::invalid_argument("EvoConfig: mutation_rate must be in [0,1]");
  if (!(mutation_std > 0.0))
    throw std::invalid_argument("EvoConfig: mutation_std must be > 0");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0))
    throw std::invalid_argument("EvoConfig: elite_fraction must be in (0,1]");
  if (max_generations < 1)
    throw std::invalid_argument("EvoConfig: max_generations must be >= 1");
  if (!(init_std > 0.0))
    throw std::invalid_argument("EvoConfig: init_std must be > 0");
}

double EvoConfig::resolved_mutation_rate(int n) const {
  if (mutation_rate) return *mutation_rate;
  return 0.5 / (static_cast<double>(n) * n);
}

int EvoConfig::survivor_count() const {
  const int k = static_cast<int>(std::ceil(elite_fraction * population_size));
  return std::clamp(k, 1, population_size);
}

std::vector<GeneCircuit> init_population(int n, const EvoConfig& cfg,
                                         Rng& rng) {
  std::vector<GeneCircuit> pop;
  pop.reserve(cfg.population_size);
  for (int i = 0; i < cfg.population_size; ++i)
    pop.push_back(GeneCircuit::random(n, cfg.init_std, rng));
  return pop;
}

std::vector<GeneCircuit> select(const std::vector<GeneCircuit>& population,
                                const std::vector<double>& costs,
                                const EvoConfig& cfg) {
  if (population.size() != costs.size())
    throw std::invalid_argument("select: population/cost size mismatch");
  if (population.empty()) throw std::invalid_argument("select: empty population");
  const auto order = ranked_indices(costs);
  const int k = std::min<int>(cfg.survivor_count(),
                              static_cast<int>(population.size()));
  std::vector<GeneCircuit> survivors;
  survivors.reserve(k);
  for (int i = 0; i < k; ++i) survivors.push_back(population[order[i]]);
  return survivors;
}

GeneCircuit crossover(const GeneCircuit& a, const GeneCircuit& b,
                      const EvoConfig& cfg, Rng& rng) {
  if (a.n != b.n)
    throw std::invalid_argument("crossover: parent size mismatch");
  if (!rng.bernoulli(cfg.crossover_rate)) return a;
  GeneCircuit child(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      child.weights(i, j) =
          rng.bernoulli(0.5) ? a.weights(i, j) : b.weights(i, j);
  return child;
}

GeneCircuit mutate(const GeneCircuit& circuit, const EvoConfig& cfg,
                   Rng& rng) {
  const double rate = cfg.resolved_mutation_rate(circuit.n);
  GeneCircuit out = circuit;
  for (int i = 0; i < out.n; ++i)
    for (int j = 0; j < out.n; ++j)
      if (rng.bernoulli(rate))
        out.weights(i, j) += cfg.mutation_std * rng.gauss();
  return out;
}

TrainResult evolve(int n, const TargetSpec& target, const SimConfig& sim,
                   const EvoConfig& cfg, const LossConfig& loss) {
  if (n < 2) throw std::invalid_argument("evolve: n must be >= 2");
  target.validate();
  sim.validate();
  cfg.validate();
  loss.validate();

  const auto t_start = std::chrono::steady_clock::now();
  const auto grid = sample_grid(target);
  const Vector targets = target_vector(target);
  const int out_col = n - 1;

  Rng rng(cfg.rng_seed);
  std::vector<GeneCircuit> pop = init_population(n, cfg, rng);
  const int P = cfg.population_size;

  struct Eval {
    double cost = kInf;
    double mse = kInf;
    bool valid = false;
  };
  std::vector<Eval> evals(P);
  std::vector<double> costs(P);

  const auto evaluate = [&](const GeneCircuit& c) -> Eval {
    try {
      const Matrix curve = response_curve(c, grid, sim);
      if (!curve.allFinite()) return {};
      const double m = mse(curve.col(out_col), targets);
      return {m + loss.l1_lambda * c.l1_norm(), m, true};
    } catch (const NonFiniteState&) {
      return {};
    }
  };

  TrainResult res;
  res.seed = cfg.rng_seed;
  res.trainer = Trainer::Evolutionary;

  int best = 0;
  for (int gen = 0; gen < cfg.max_generations; ++gen) {
    // Cost evaluation draws no randomness, so the stream position stays a
    // pure function of the generation number.
    for (int i = 0; i < P; ++i) {
      evals[i] = evaluate(pop[i]);
      costs[i] = evals[i].cost;
    }
    const auto order = ranked_indices(costs);
    best = order[0];
    res.loss_history.push_back(costs[best]);
    ++res.iterations_used;

    if (evals[best].valid && evals[best].mse <= loss.success_mse) {
      res.success = true;
      break;
    }
    if (gen + 1 == cfg.max_generations) break;  // would never be evaluated

    const int k = std::min<int>(cfg.survivor_count(), P);
    std::vector<GeneCircuit> next;
    next.reserve(P);
    next.push_back(pop[best]);  // elite passes through untouched
    for (int i = 1; i < P; ++i) {
      const GeneCircuit& pa = pop[order[rng.index(k)]];
      const GeneCircuit& pb = pop[order[rng.index(k)]];
      next.push_back(mutate(crossover(pa, pb, cfg, rng), cfg, rng));
    }
    pop = std::move(next);
  }

  res.circuit = pop[best];
  res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  return res;
}

}  // namespace gcl
