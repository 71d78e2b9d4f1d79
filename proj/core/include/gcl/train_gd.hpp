#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gcl/circuit.hpp"
#include "gcl/sim.hpp"
#include "gcl/targets.hpp"

namespace gcl {

enum class Trainer { GradientDescent, Evolutionary, HybridMutatedGd };

const char* trainer_name(Trainer t);
Trainer trainer_from_name(std::string_view name);  // throws invalid_argument

struct GdConfig {
  double learning_rate = 0.05;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_iters = 2000;
  // Fixed integration depth used while computing gradients. Differentiating
  // through a convergence-dependent number of steps would make the loss
  // discontinuous in W, so training always unrolls exactly this many steps;
  // the convergence-based simulator is used only for the final success test.
  int unroll_steps = 100;
  double init_std = 1.0;
  std::uint64_t rng_seed = 1;
  // When > 0, every weight entry independently receives additive Gaussian
  // noise (std mutation_std) with this probability after each Adam step --
  // the hybrid mutated-descent variant. 0 disables it.
  double mutation_rate = 0.0;
  double mutation_std = 0.5;

  void validate() const;
};

struct TrainResult {
  GeneCircuit circuit;
  std::vector<double> loss_history;  // one entry per evaluated iterate
  bool success = false;
  bool diverged = false;
  int iterations_used = 0;
  std::uint64_t seed = 0;
  Trainer trainer = Trainer::GradientDescent;
  // Wall-clock time, for operator-facing reporting only. Never serialized:
  // record files must be identical across reruns and machines.
  std::int64_t wall_ms = 0;
};

struct LossAndGrad {
  double loss = 0.0;  // mse + l1 penalty
  double mse = 0.0;
  Matrix grad;        // d loss / d W
};

// Loss and exact reverse-mode gradient through cfg.max_steps unrolled Euler
// steps per grid point (no convergence early-exit; see GdConfig::unroll_steps
// for why the depth is fixed). The L1 subgradient at an entry equal to zero
// is taken as zero. If the forward pass produces a non-finite output the
// result is loss = +inf with a zero gradient rather than an exception, so
// the caller can record the divergence.
LossAndGrad loss_and_gradient(const GeneCircuit& circuit,
                              const TargetSpec& target, const SimConfig& sim,
                              const LossConfig& loss);

struct AdamState {
  Matrix m;  // first-moment estimate
  Matrix v;  // second-moment estimate
  explicit AdamState(int n) : m(Matrix::Zero(n, n)), v(Matrix::Zero(n, n)) {}
};

// One bias-corrected Adam update, t counting from 1. Updates weights and the
// moment estimates in place.
void adam_step(Matrix& weights, const Matrix& grad, AdamState& state, int t,
               const GdConfig& cfg);

// Gradient-descent training of a fresh random circuit against the target.
// Deterministic given cfg.rng_seed. The returned circuit is the last iterate
// (or the iterate that passed the success test), and `success` always agrees
// with is_success re-evaluated on the returned circuit under `sim`.
TrainResult train_gd(int n, const TargetSpec& target, const SimConfig& sim,
                     const GdConfig& cfg, const LossConfig& loss);

// Copy with every entry |W_ij| < tau set to exactly 0. Idempotent.
GeneCircuit prune(const GeneCircuit& circuit, double tau);

}  // namespace gcl
