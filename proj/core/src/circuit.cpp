#include "gcl/circuit.hpp"

#include "gcl/rng.hpp"

namespace gcl {

GeneCircuit GeneCircuit::random(int nodes, double init_std, Rng& rng) {
  if (nodes < 1) throw std::invalid_argument("GeneCircuit::random: nodes < 1");
  if (!(init_std > 0.0))
    throw std::invalid_argument("GeneCircuit::random: init_std must be > 0");
  GeneCircuit c(nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) c.weights(i, j) = init_std * rng.gauss();
  return c;
}

void GeneCircuit::validate() const {
  if (n < 1) throw std::invalid_argument("GeneCircuit: n must be >= 1");
  if (weights.rows() != n || weights.cols() != n)
    throw std::invalid_argument("GeneCircuit: weights must be n x n (n=" +
                                std::to_string(n) + ")");
  if (!weights.allFinite())
    throw std::invalid_argument("GeneCircuit: weights contain NaN/inf");
}

}  // namespace gcl
