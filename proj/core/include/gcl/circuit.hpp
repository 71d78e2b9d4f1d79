#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gcl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Integration produced NaN or infinity; callers treat the run as diverged.
struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The dense eigensolver hit its internal iteration cap.
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No fixed point was reached within the simulation step budget.
struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Rng;

// An n-gene circuit. weights(i, j) is the influence of gene j's expression
// level on gene i's activation input: positive entries activate, negative
// entries repress. By convention gene 0 receives the external input and
// gene n-1 is read out as the circuit's output.
struct GeneCircuit {
  int n = 0;
  Matrix weights;  // n x n

  GeneCircuit() = default;
  explicit GeneCircuit(int nodes)
      : n(nodes), weights(Matrix::Zero(nodes, nodes)) {}
  GeneCircuit(int nodes, Matrix w) : n(nodes), weights(std::move(w)) {
    validate();
  }

  // i.i.d. Gaussian entries, mean 0, standard deviation init_std, filled in
  // row-major order from rng.
  static GeneCircuit random(int nodes, double init_std, Rng& rng);

  // Throws std::invalid_argument unless n >= 1 and weights is a finite
  // n x n matrix.
  void validate() const;

  double l1_norm() const { return weights.cwiseAbs().sum(); }
};

}  // namespace gcl
