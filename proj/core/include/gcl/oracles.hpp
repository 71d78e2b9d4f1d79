#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gcl/analysis.hpp"
#include "gcl/train_gd.hpp"

namespace gcl {

// Independent re-implementations of the numerically interesting pieces,
// deliberately built by different methods than the production code so that
// agreement actually means something. They back the `verify` command and the
// correctness tests; they are slow and that is fine.

// Forward-only unrolled loss (fixed depth cfg.max_steps), computed through
// the public stepper one call at a time.
double unrolled_loss(const GeneCircuit& circuit, const TargetSpec& target,
                     const SimConfig& sim, const LossConfig& loss);

// Central finite differences of unrolled_loss, entry by entry.
Matrix finite_difference_gradient(const GeneCircuit& circuit,
                                  const TargetSpec& target,
                                  const SimConfig& sim, const LossConfig& loss,
                                  double h = 1e-5);

// Roots of det(M - x I) for n <= 4 via the closed-form cubic/quartic
// formulas on the explicitly expanded characteristic polynomial. No
// iterative eigensolver anywhere in here.
std::vector<std::complex<double>> charpoly_roots(const Matrix& m);

// Edge connectivity by exhaustively deleting edge subsets in increasing
// size. Exponential in the edge count; keep graphs small (n <= 6).
int brute_force_edge_connectivity(const UndirectedGraph& g);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // one-line summary: counts, worst error, ...
  double ms = 0.0;
};

using GradientFn =
    std::function<LossAndGrad(const GeneCircuit&, const TargetSpec&,
                              const SimConfig&, const LossConfig&)>;

// Analytic gradient vs finite differences on random circuits and both
// target families. Passes when every entry agrees to 1e-4 relative error
// (absolute floor 1e-7). The gradient implementation is injectable so tests
// can prove the check rejects a corrupted gradient.
CheckResult check_gradients(const GradientFn& grad_fn, int circuits,
                            unsigned long long seed);
CheckResult check_gradients();  // production gradient, default budget

// Solver eigenvalues vs closed-form characteristic polynomial roots on
// random 2x2..4x4 matrices, matched by permutation to 1e-6.
CheckResult check_eigenvalues(int matrices = 50, unsigned long long seed = 5);

// Max-flow edge connectivity vs exhaustive edge deletion on random graphs
// with up to 6 vertices.
CheckResult check_connectivity(int graphs = 100, unsigned long long seed = 6);

// W = 0 analytic fixed point and its Jacobian spectrum (all eigenvalues
// exactly -1).
CheckResult check_fixed_point();

// The full battery above with default budgets.
std::vector<CheckResult> verify_suite();

}  // namespace gcl
