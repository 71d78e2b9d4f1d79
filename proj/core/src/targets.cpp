#include "gcl/targets.hpp"

#include <cmath>
#include <cstdio>

namespace gcl {

TargetSpec TargetSpec::french_flag(double lo, double hi) {
  TargetSpec s;
  s.kind = TargetKind::FrenchFlag;
  s.lo = lo;
  s.hi = hi;
  return s;
}

TargetSpec TargetSpec::switch_at(double threshold) {
  TargetSpec s;
  s.kind = TargetKind::Switch;
  s.threshold = threshold;
  return s;
}

void TargetSpec::validate() const {
  if (!(grid_min < grid_max))
    throw std::invalid_argument("TargetSpec: grid_min must be < grid_max");
  if (grid_points < 8)
    throw std::invalid_argument("TargetSpec: grid_points must be >= 8");
  if (kind == TargetKind::FrenchFlag) {
    if (!(lo < hi)) throw std::invalid_argument("TargetSpec: need lo < hi");
    if (!(grid_min < lo && hi < grid_max))
      throw std::invalid_argument(
          "TargetSpec: band [lo,hi] must lie strictly inside the grid");
  } else {
    if (!(grid_min < threshold && threshold < grid_max))
      throw std::invalid_argument(
          "TargetSpec: threshold must lie strictly inside the grid");
  }
}

std::string TargetSpec::name() const {
  char buf[96];
  if (kind == TargetKind::FrenchFlag)
    std::snprintf(buf, sizeof buf, "french_flag(%g,%g)", lo, hi);
  else
    std::snprintf(buf, sizeof buf, "switch(%g)", threshold);
  return buf;
}

void LossConfig::validate() const {
  if (!(l1_lambda >= 0.0 && l1_lambda <= 1.0))
    throw std::invalid_argument("LossConfig: l1_lambda must be in [0,1]");
  if (!(success_mse > 0.0 && success_mse < 0.25))
    throw std::invalid_argument("LossConfig: success_mse must be in (0,0.25)");
}

double eval_target(const TargetSpec& spec, double x) {
  if (spec.kind == TargetKind::FrenchFlag)
    return (x > spec.lo && x < spec.hi) ? 1.0 : 0.0;
  return (x > spec.threshold) ? 1.0 : 0.0;
}

std::vector<double> sample_grid(const TargetSpec& spec) {
  if (spec.grid_points < 2)
    throw std::invalid_argument("sample_grid: need at least 2 points");
  const int m = spec.grid_points;
  const double step = (spec.grid_max - spec.grid_min) / (m - 1);
  std::vector<double> grid(m);
  for (int k = 0; k < m; ++k) grid[k] = spec.grid_min + k * step;
  grid.back() = spec.grid_max;  // exact endpoint regardless of rounding
  return grid;
}

Vector target_vector(const TargetSpec& spec) {
  const auto grid = sample_grid(spec);
  Vector t(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k)
    t[static_cast<Eigen::Index>(k)] = eval_target(spec, grid[k]);
  return t;
}

double mse(const Vector& prediction, const Vector& target) {
  if (prediction.size() != target.size())
    throw std::invalid_argument("mse: length mismatch");
  if (prediction.size() == 0) throw std::invalid_argument("mse: empty input");
  return (prediction - target).squaredNorm() /
         static_cast<double>(prediction.size());
}

double regularized_cost(const GeneCircuit& circuit, const Vector& prediction,
                        const Vector& target, const LossConfig& loss) {
  return mse(prediction, target) + loss.l1_lambda * circuit.l1_norm();
}

bool is_success(const Vector& output_curve, const TargetSpec& spec,
                const LossConfig& loss) {
  if (!output_curve.allFinite()) return false;
  return mse(output_curve, target_vector(spec)) <= loss.success_mse;
}

}  // namespace gcl
