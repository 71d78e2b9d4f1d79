#pragma once

#include <string>
#include <vector>

#include "gcl/circuit.hpp"

namespace gcl {

enum class TargetKind { FrenchFlag, Switch };

// A binary target response sampled on a uniform input grid.
//
// FrenchFlag: 1 on the open band (lo, hi), 0 outside -- a band detector.
// Switch:     1 strictly above `threshold`, 0 at or below it.
struct TargetSpec {
  TargetKind kind = TargetKind::FrenchFlag;
  double lo = 0.5;
  double hi = 1.5;
  double threshold = 1.0;
  double grid_min = 0.0;
  double grid_max = 2.0;
  int grid_points = 60;

  static TargetSpec french_flag(double lo = 0.5, double hi = 1.5);
  static TargetSpec switch_at(double threshold = 1.0);

  // Throws std::invalid_argument unless the band (or threshold) sits
  // strictly inside the grid and the grid has at least 8 points.
  void validate() const;

  // Short label for file names and logs, e.g. "french_flag(0.5,1.5)".
  std::string name() const;
};

struct LossConfig {
  double l1_lambda = 0.0;    // weight of the L1 penalty on W
  double success_mse = 0.05; // grid MSE at or below this counts as learned

  void validate() const;  // l1_lambda in [0,1], success_mse in (0,0.25)
};

// Target value at input x; always exactly 0.0 or 1.0.
double eval_target(const TargetSpec& spec, double x);

// Uniform grid over [grid_min, grid_max], inclusive endpoints. Requires
// points >= 2 (grid_points on the spec); the last point is exactly grid_max.
std::vector<double> sample_grid(const TargetSpec& spec);

// eval_target evaluated over sample_grid(spec).
Vector target_vector(const TargetSpec& spec);

// Mean squared error; throws std::invalid_argument on a length mismatch.
double mse(const Vector& prediction, const Vector& target);

// mse + l1_lambda * sum_ij |W_ij|.
double regularized_cost(const GeneCircuit& circuit, const Vector& prediction,
                        const Vector& target, const LossConfig& loss);

// A response curve counts as a learned solution when it is finite everywhere
// and its MSE against the target is at or below loss.success_mse.
bool is_success(const Vector& output_curve, const TargetSpec& spec,
                const LossConfig& loss);

}  // namespace gcl
