#include "gcl/train_gd.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "gcl/rng.hpp"

namespace gcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The cheap fixed-depth MSE only gates the expensive convergence-based
// success test; it is allowed to be optimistic by this factor.
constexpr double kSuccessGateMargin = 1.25;

double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

const char* trainer_name(Trainer t) {
  switch (t) {
    case Trainer::GradientDescent: return "gradient_descent";
    case Trainer::Evolutionary: return "evolutionary";
    case Trainer::HybridMutatedGd: return "hybrid_mutated_gd";
  }
  return "?";
}

Trainer trainer_from_name(std::string_view name) {
  if (name == "gradient_descent" || name == "gd")
    return Trainer::GradientDescent;
  if (name == "evolutionary" || name == "evo") return Trainer::Evolutionary;
  if (name == "hybrid_mutated_gd" || name == "hybrid")
    return Trainer::HybridMutatedGd;
  throw std::invalid_argument("unknown trainer '" + std::string(name) + "'");
}

void GdConfig::validate() const {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("GdConfig: learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("GdConfig: betas must be in (0,1)");
  if (!(adam_eps > 0.0))
    throw std::invalid_argument("GdConfig: adam_eps must be > 0");
  if (max_iters < 1)
    throw std::invalid_argument("GdConfig: max_iters must be >= 1");
  if (unroll_steps < 1)
    throw std::invalid_argument("GdConfig: unroll_steps must be >= 1");
  if (!(init_std > 0.0))
    throw std::invalid_argument("GdConfig: init_std must be > 0");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw std::invalid_argument("GdConfig: mutation_rate must be in [0,1]");
  if (!(mutation_std > 0.0))
    throw std::invalid_argument("GdConfig: mutation_std must be > 0");
}

LossAndGrad loss_and_gradient(const GeneCircuit& circuit,
                              const TargetSpec& target, const SimConfig& sim,
                              const LossConfig& loss) {
  const int n = circuit.n;
  const int T = sim.max_steps;
  const bool clamp = sim.input_mode == InputMode::ClampFirstNode;
  const double dt = sim.dt;
  const Matrix& W = circuit.weights;

  const auto grid = sample_grid(target);
  const int m = static_cast<int>(grid.size());

  // Tape: column t holds the state y_t (resp. activation a_t = phi(W y_t)).
  Matrix ys(n, T + 1);
  Matrix as(n, T);
  Vector u(n), g(n), s(n);
  Matrix grad = Matrix::Zero(n, n);
  double sq_err = 0.0;

  for (int k = 0; k < m; ++k) {
    const double x = grid[k];

    ys.col(0).setConstant(sim.initial_state);
    for (int t = 0; t < T; ++t) {
      u.noalias() = W * ys.col(t);
      for (int i = 0; i < n; ++i) as(i, t) = sigmoid(u[i]);
      if (clamp) {
        ys.col(t + 1) = ys.col(t) + dt * (as.col(t) - ys.col(t));
        ys(0, t + 1) = x;
      } else {
        ys.col(t + 1) = ys.col(t) + dt * (as.col(t) - ys.col(t));
        ys(0, t + 1) += dt * x;
      }
    }

    const double out = ys(n - 1, T);
    if (!std::isfinite(out))
      return {kInf, kInf, Matrix::Zero(n, n)};
    const double err = out - eval_target(target, x);
    sq_err += err * err;

    // Reverse pass. g holds dL/dy_{t+1} entering iteration t; only the MSE
    // part flows through the dynamics (the L1 term is added at the end).
    //
    //   y_{t+1} = (1 - dt) y_t + dt phi(W y_t) + dt x e_0      (drive)
    //   dL/dW   += dt (phi' o g) y_t^T
    //   dL/dy_t  = (1 - dt) g + dt W^T (phi' o g)
    //
    // In clamp mode y_{t+1,0} is the constant x, so its incoming adjoint is
    // discarded before each backward step.
    g.setZero();
    g[n - 1] = (2.0 / m) * err;
    for (int t = T - 1; t >= 0; --t) {
      if (clamp) g[0] = 0.0;
      for (int i = 0; i < n; ++i) {
        const double a = as(i, t);
        s[i] = a * (1.0 - a) * g[i];
      }
      grad.noalias() += dt * s * ys.col(t).transpose();
      g = (1.0 - dt) * g + dt * (W.transpose() * s);
    }
  }

  LossAndGrad out;
  out.mse = sq_err / m;
  out.loss = out.mse + loss.l1_lambda * circuit.l1_norm();
  out.grad = std::move(grad);
  if (loss.l1_lambda != 0.0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.grad(i, j) += loss.l1_lambda * sign_of(W(i, j));
  return out;
}

void adam_step(Matrix& weights, const Matrix& grad, AdamState& state, int t,
               const GdConfig& cfg) {
  if (t < 1) throw std::invalid_argument("adam_step: t counts from 1");
  state.m = cfg.adam_beta1 * state.m + (1.0 - cfg.adam_beta1) * grad;
  state.v = cfg.adam_beta2 * state.v +
            (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
  weights.array() -= cfg.learning_rate * (state.m.array() / c1) /
                     ((state.v.array() / c2).sqrt() + cfg.adam_eps);
}

TrainResult train_gd(int n, const TargetSpec& target, const SimConfig& sim,
                     const GdConfig& cfg, const LossConfig& loss) {
  if (n < 2) throw std::invalid_argument("train_gd: n must be >= 2");
  target.validate();
  sim.validate();
  cfg.validate();
  loss.validate();

  const auto t_start = std::chrono::steady_clock::now();
  Rng rng(cfg.rng_seed);
  GeneCircuit circuit = GeneCircuit::random(n, cfg.init_std, rng);

  SimConfig train_sim = sim;
  train_sim.max_steps = cfg.unroll_steps;

  const auto grid = sample_grid(target);
  AdamState adam(n);

  TrainResult res;
  res.seed = cfg.rng_seed;
  res.trainer = cfg.mutation_rate > 0.0 ? Trainer::HybridMutatedGd
                                        : Trainer::GradientDescent;

  // The authoritative success test: simulate to convergence under the
  // caller's sim config and score the output column.
  const auto passes = [&](const GeneCircuit& c) {
    try {
      const Matrix curve = response_curve(c, grid, sim);
      return is_success(curve.col(n - 1), target, loss);
    } catch (const NonFiniteState&) {
      return false;
    }
  };

  for (int it = 0; it < cfg.max_iters; ++it) {
    const LossAndGrad lg = loss_and_gradient(circuit, target, train_sim, loss);
    if (!std::isfinite(lg.loss)) {
      if (res.loss_history.empty())
        throw NonFiniteState("train_gd: initial iterate already diverges");
      res.diverged = true;
      break;
    }
    res.loss_history.push_back(lg.loss);
    if (lg.mse <= loss.success_mse * kSuccessGateMargin && passes(circuit)) {
      res.success = true;
      break;
    }
    adam_step(circuit.weights, lg.grad, adam, it + 1, cfg);
    ++res.iterations_used;
    if (cfg.mutation_rate > 0.0)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (rng.bernoulli(cfg.mutation_rate))
            circuit.weights(i, j) += cfg.mutation_std * rng.gauss();
  }

  if (!res.success && circuit.weights.allFinite()) res.success = passes(circuit);
  res.circuit = std::move(circuit);
  res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  return res;
}

GeneCircuit prune(const GeneCircuit& circuit, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("prune: tau must be >= 0");
  GeneCircuit out = circuit;
  for (int i = 0; i < out.n; ++i)
    for (int j = 0; j < out.n; ++j)
      if (std::abs(out.weights(i, j)) < tau) out.weights(i, j) = 0.0;
  return out;
}

}  // namespace gcl
