#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcl/circuit.hpp"

namespace gcl {

// How the scalar input x enters the circuit.
//
// DriveFirstNode adds x to gene 0's rate equation, so gene 0 integrates the
// input together with its regulatory drive. ClampFirstNode instead pins
// gene 0's expression to x after every step; gene 0 then acts as a pure
// sensor whose own regulation is ignored.
enum class InputMode { DriveFirstNode, ClampFirstNode };

struct SimConfig {
  double dt = 0.2;
  int max_steps = 250;
  double convergence_tol = 1e-6;
  InputMode input_mode = InputMode::DriveFirstNode;
  double initial_state = 0.0;

  // Throws std::invalid_argument on nonsense (dt <= 0, max_steps < 1, ...).
  void validate() const;

  // Non-fatal configuration smells, e.g. a time horizon dt*max_steps too
  // short for typical circuits to settle.
  std::optional<std::string> warning() const;
};

// Logistic function 1 / (1 + exp(-u)), safe across the whole double range.
double sigmoid(double u);

// d/du sigmoid(u) = sigmoid(u) * (1 - sigmoid(u)).
double sigmoid_prime(double u);

// One explicit Euler step of
//   dy_i/dt = sigmoid((W y)_i) + I_i - y_i
// where I = x * e_0 in DriveFirstNode mode and I = 0 in ClampFirstNode mode
// (gene 0 is overwritten with x after the step instead). Throws
// NonFiniteState if the new state is not finite, std::invalid_argument on a
// state/circuit size mismatch.
Vector euler_step(const GeneCircuit& circuit, const Vector& state,
                  double input_value, const SimConfig& cfg);

struct SettleResult {
  Vector state;
  bool converged = false;
  int steps = 0;  // steps actually taken before the convergence test passed
};

// Integrate from `from` until the infinity norm of the per-step change
// divided by dt falls below convergence_tol (checked before each step), or
// max_steps is exhausted. Throws NonFiniteState if the state blows up.
SettleResult settle_from(const GeneCircuit& circuit, Vector from,
                         double input_value, const SimConfig& cfg);

// settle_from starting at the uniform state cfg.initial_state.
SettleResult steady_state(const GeneCircuit& circuit, double input_value,
                          const SimConfig& cfg);

struct Trajectory {
  std::vector<Vector> states;  // states[0] is the initial state
  bool converged = false;
  int steps_taken = 0;
};

// Like steady_state but records the state after every step.
Trajectory simulate_trajectory(const GeneCircuit& circuit, double input_value,
                               const SimConfig& cfg);

// Row k holds the steady state for grid[k]; column n-1 is the circuit
// output. grid must be nonempty and strictly ascending.
Matrix response_curve(const GeneCircuit& circuit,
                      const std::vector<double>& grid, const SimConfig& cfg);

}  // namespace gcl
