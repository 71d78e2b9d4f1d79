#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "gcl/circuit.hpp"
#include "gcl/sim.hpp"
#include "gcl/targets.hpp"

namespace gcl {

// Jacobian of the rate equation at `state`:
//   J_ij = sigmoid'((W y)_i) * W_ij - delta_ij.
// In ClampFirstNode mode gene 0 is pinned, so its row is replaced by the
// pure decay row -e_0 (perturbations of the pinned gene are restored by the
// clamp, not by the dynamics).
Matrix jacobian(const GeneCircuit& circuit, const Vector& state,
                InputMode mode = InputMode::DriveFirstNode);

// Eigenvalues of a square finite matrix, sorted by descending real part,
// then descending imaginary part. Throws NoConvergence if the underlying
// iteration fails (rare; dense real Schur).
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

struct StabilityReport {
  Vector fixed_point;
  Matrix jacobian;
  std::vector<std::complex<double>> eigenvalues;  // sorted as above
  double max_real_part = 0.0;
  bool stable = false;  // max_real_part < 0
};

// Linear stability of the simulated fixed point at reference_input. Throws
// NotConverged when no fixed point is reached within cfg.max_steps and
// NonFiniteState when the simulation blows up.
StabilityReport stability_report(const GeneCircuit& circuit,
                                 double reference_input, const SimConfig& cfg);

// Empirical stability probe: perturb the fixed point with uniform noise in
// [-perturbation, perturbation] (seeded), integrate, and test whether the
// state returns to within return_tol (infinity norm) of the fixed point.
bool perturb_and_return(const GeneCircuit& circuit, const Vector& fixed_point,
                        double input_value, const SimConfig& cfg,
                        std::uint64_t seed, double perturbation = 1e-3,
                        double return_tol = 1e-4);

struct WeightHistogram {
  double bin_width = 0.0;
  double lo = 0.0;                  // left edge of counts[0]
  std::vector<std::int64_t> counts; // symmetric around zero
  double mean = 0.0;
  double negative_fraction = 0.0;   // among nonzero entries; 0 if none
};

// Histogram over an explicit list of values; bins are [lo + k*w, lo + (k+1)*w)
// with the range symmetric around zero and just wide enough to cover the data.
WeightHistogram histogram_from_values(const std::vector<double>& values,
                                      double bin_width);

// histogram_from_values over all n^2 weight entries.
WeightHistogram weight_sign_histogram(const GeneCircuit& circuit,
                                      double bin_width);

// Incoming regulation strength per gene: strength_i = sum_j |W_ij|.
Vector node_strength(const GeneCircuit& circuit);

// Signed incoming regulation per gene: feedback_i = sum_j W_ij.
Vector feedback_sum(const GeneCircuit& circuit);

// Simple undirected graph on n vertices, no self-loops.
struct UndirectedGraph {
  int n = 0;
  std::vector<std::vector<char>> adj;

  UndirectedGraph() = default;
  explicit UndirectedGraph(int nodes)
      : n(nodes), adj(nodes, std::vector<char>(nodes, 0)) {}

  void add_edge(int i, int j);
  bool has_edge(int i, int j) const { return adj[i][j] != 0; }
  std::vector<std::pair<int, int>> edges() const;  // i < j, lexicographic
};

// Undirected skeleton of the circuit: vertices i < j are adjacent iff
// max(|W_ij|, |W_ji|) >= edge_tau. Self-regulation never contributes edges.
UndirectedGraph binarize(const GeneCircuit& circuit, double edge_tau);

// Global edge connectivity: the minimum number of edge removals that
// disconnects the graph (0 if already disconnected or n < 2). Computed as
// the minimum over t != s of the max-flow between s and t with unit edge
// capacities.
int edge_connectivity(const UndirectedGraph& g);

enum class TeamClass { Homogeneous, Heterogeneous, Mixed };

const char* team_class_name(TeamClass c);

struct NodeTeamStats {
  int node = 0;
  double conformity = 0.0;          // Pearson r against the target, 0 if flat
  double passband_amplitude = 0.0;  // max response where the target is 1
  bool supervised = false;          // true only for the output gene
};

struct TeamReport {
  std::vector<NodeTeamStats> per_node;
  double mean_unsupervised_conformity = 0.0;
  TeamClass classification = TeamClass::Mixed;
};

// Do the hidden genes move with the output or against it? `curves` is a
// response_curve result over the target's own grid (rows = grid points,
// columns = genes). Genes whose mean conformity exceeds +0.3 make the
// circuit Homogeneous, below -0.3 Heterogeneous, otherwise Mixed.
TeamReport team_metrics(const Matrix& curves, const TargetSpec& spec);

}  // namespace gcl
