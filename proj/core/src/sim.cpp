#include "gcl/sim.hpp"

#include <cmath>

namespace gcl {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (max_steps < 1)
    throw std::invalid_argument("SimConfig: max_steps must be >= 1");
  if (!(convergence_tol >= 0.0))
    throw std::invalid_argument("SimConfig: convergence_tol must be >= 0");
  if (!std::isfinite(initial_state))
    throw std::invalid_argument("SimConfig: initial_state must be finite");
}

std::optional<std::string> SimConfig::warning() const {
  if (dt * max_steps < 10.0)
    return "time horizon dt*max_steps = " + std::to_string(dt * max_steps) +
           " is short; circuits may be cut off before settling";
  if (dt > 1.0)
    return "dt > 1 overshoots the decay term; expect oscillatory artifacts";
  return std::nullopt;
}

double sigmoid(double u) {
  // Branch on sign so exp never overflows.
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double sigmoid_prime(double u) {
  const double s = sigmoid(u);
  return s * (1.0 - s);
}

Vector euler_step(const GeneCircuit& circuit, const Vector& state,
                  double input_value, const SimConfig& cfg) {
  if (state.size() != circuit.n)
    throw std::invalid_argument("euler_step: state size != circuit.n");
  const int n = circuit.n;
  Vector u = circuit.weights * state;
  Vector next(n);
  if (cfg.input_mode == InputMode::DriveFirstNode) {
    for (int i = 0; i < n; ++i) {
      const double drive = (i == 0) ? input_value : 0.0;
      next[i] = state[i] + cfg.dt * (sigmoid(u[i]) + drive - state[i]);
    }
  } else {
    for (int i = 0; i < n; ++i)
      next[i] = state[i] + cfg.dt * (sigmoid(u[i]) - state[i]);
    next[0] = input_value;
  }
  if (!next.allFinite())
    throw NonFiniteState("euler_step: state became non-finite");
  return next;
}

SettleResult settle_from(const GeneCircuit& circuit, Vector from,
                         double input_value, const SimConfig& cfg) {
  if (from.size() != circuit.n)
    throw std::invalid_argument("settle_from: state size != circuit.n");
  if (!from.allFinite())
    throw NonFiniteState("settle_from: non-finite initial state");
  const int n = circuit.n;
  const bool clamp = cfg.input_mode == InputMode::ClampFirstNode;
  Vector u(n), f(n);
  Vector y = std::move(from);
  for (int step = 0; step < cfg.max_steps; ++step) {
    u.noalias() = circuit.weights * y;
    double resid = 0.0;
    if (clamp) {
      // Gene 0 is overwritten with the input after the step, so its
      // per-step change is input - y[0] (zero once the clamp has applied).
      resid = std::abs(input_value - y[0]) / cfg.dt;
      for (int i = 1; i < n; ++i) {
        f[i] = sigmoid(u[i]) - y[i];
        resid = std::max(resid, std::abs(f[i]));
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const double drive = (i == 0) ? input_value : 0.0;
        f[i] = sigmoid(u[i]) + drive - y[i];
        resid = std::max(resid, std::abs(f[i]));
      }
    }
    // Residual is checked before stepping so the returned state is the one
    // the fixed-point test was measured on.
    if (resid < cfg.convergence_tol) return {std::move(y), true, step};
    if (clamp) {
      for (int i = 1; i < n; ++i) y[i] += cfg.dt * f[i];
      y[0] = input_value;
    } else {
      y += cfg.dt * f;
    }
    // NaN hides from the max() above (comparisons are false), so a state
    // check after the update is the only reliable overflow trap.
    if (!y.allFinite())
      throw NonFiniteState("settle_from: state became non-finite");
  }
  return {std::move(y), false, cfg.max_steps};
}

SettleResult steady_state(const GeneCircuit& circuit, double input_value,
                          const SimConfig& cfg) {
  return settle_from(circuit, Vector::Constant(circuit.n, cfg.initial_state),
                     input_value, cfg);
}

Trajectory simulate_trajectory(const GeneCircuit& circuit, double input_value,
                               const SimConfig& cfg) {
  Trajectory traj;
  Vector y = Vector::Constant(circuit.n, cfg.initial_state);
  traj.states.push_back(y);
  for (int step = 0; step < cfg.max_steps; ++step) {
    Vector next = euler_step(circuit, y, input_value, cfg);
    const double resid = (next - y).lpNorm<Eigen::Infinity>() / cfg.dt;
    if (resid < cfg.convergence_tol) {
      traj.converged = true;
      traj.steps_taken = step;
      return traj;
    }
    y = std::move(next);
    traj.states.push_back(y);
  }
  traj.steps_taken = cfg.max_steps;
  return traj;
}

Matrix response_curve(const GeneCircuit& circuit,
                      const std::vector<double>& grid, const SimConfig& cfg) {
  if (grid.empty())
    throw std::invalid_argument("response_curve: empty input grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw std::invalid_argument(
          "response_curve: grid must be strictly ascending");
  Matrix out(static_cast<Eigen::Index>(grid.size()), circuit.n);
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) =
        steady_state(circuit, grid[k], cfg).state.transpose();
  return out;
}

}  // namespace gcl
