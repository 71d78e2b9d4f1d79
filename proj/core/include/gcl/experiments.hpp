#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gcl/analysis.hpp"
#include "gcl/train_evo.hpp"
#include "gcl/train_gd.hpp"

namespace gcl {

// L1 handling for a batch of trials. None forces l1_lambda to 0 regardless
// of the loss config; L1 applies the configured penalty; L1Pruned applies it
// and additionally magnitude-prunes the stored circuit before analysis.
enum class Regularization { None, L1, L1Pruned };

const char* regularization_name(Regularization r);
Regularization regularization_from_name(std::string_view name);

// Knobs for the per-trial analysis pass.
struct AnalysisParams {
  double reference_input = 1.0;  // input at which stability is probed
  double edge_tau = 0.1;         // binarization threshold
  double bin_width = 0.25;       // weight histogram bin width
  double prune_tau = 0.1;        // magnitude-pruning threshold

  void validate() const;
};

// Everything a single trial needs. One bundle so experiment drivers can be
// handed a coherent set instead of five loose configs.
struct TrialConfigs {
  TargetSpec target;
  SimConfig sim;
  LossConfig loss;
  GdConfig gd;
  EvoConfig evo;
  AnalysisParams analysis;

  void validate() const;
};

// Everything recorded about one training trial: the raw outcome plus the
// standard analysis battery on the stored circuit. Deterministic given
// (size, trial, seed, trainer, regularization, configs) -- wall-clock time
// deliberately has no field here.
struct TrialRecord {
  int size = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  Trainer trainer = Trainer::GradientDescent;
  Regularization regularization = Regularization::None;
  double l1_lambda = 0.0;
  bool success = false;
  bool diverged = false;
  // Grid MSE of the stored circuit under the evaluation simulator; NaN when
  // the response could not be computed (diverged).
  double final_mse = 0.0;
  int iterations = 0;
  std::vector<double> loss_history;
  GeneCircuit circuit;

  Vector strength;
  Vector feedback;
  WeightHistogram histogram;
  int edge_conn = 0;
  std::optional<StabilityReport> stability;  // absent if no fixed point
  std::optional<TeamReport> team;            // absent if response diverged
};

// Train one circuit and run the analysis battery on the result.
TrialRecord run_trial(int size, int trial_index, std::uint64_t seed,
                      Trainer trainer, Regularization reg,
                      const TrialConfigs& configs);

// The analysis battery alone, applied to an existing circuit (training
// fields of the record stay vacuous).
TrialRecord analyze_circuit(const GeneCircuit& circuit,
                            const TrialConfigs& configs);

struct SweepConfig {
  std::vector<int> sizes = {4, 8, 12, 16, 18};
  int trials_per_size = 30;
  Trainer trainer = Trainer::GradientDescent;
  std::uint64_t base_seed = 1;
  Regularization regularization = Regularization::None;
  TrialConfigs configs;

  void validate() const;  // sizes nonempty, strictly ascending, all >= 2
};

struct SizePoint {
  int size = 0;
  int trials = 0;
  int successes = 0;
  double ratio = 0.0;
};

struct LearnabilityCurve {
  std::vector<SizePoint> points;  // one per size, ascending
  // First size whose success ratio drops below half the smallest size's
  // ratio; unset when no size collapses.
  std::optional<int> threshold_size;
};

struct SweepResult {
  LearnabilityCurve curve;
  std::vector<TrialRecord> records;  // canonical order: size-major, then trial
};

using RecordSink = std::function<void(const TrialRecord&)>;

// Success-versus-size experiment. Trial (size, k) always runs with seed
// trial_seed(base_seed, size, k), and records are produced in canonical
// order regardless of `workers`, so the result is byte-for-byte independent
// of parallelism. `on_record` (if set) is invoked in canonical order as
// trials commit, letting callers stream records to disk.
SweepResult learnability_sweep(const SweepConfig& cfg, int workers = 1,
                               const RecordSink& on_record = {});

struct SignStudyEntry {
  int size = 0;
  int trials_used = 0;        // successful or near-successful trials pooled
  WeightHistogram histogram;  // pooled over all weight entries of those trials
};

struct SignStudy {
  std::vector<SignStudyEntry> entries;  // ascending by size
  double near_success_factor = 2.0;     // mse cutoff = factor * success_mse
};

// How does the learned weight distribution shift with circuit size? Pools
// weights per size over trials with final_mse <= 2 * success_mse (learned
// and nearly-learned circuits; at sizes past the learnability collapse the
// successful set alone is too thin to histogram).
SignStudy sign_shift_study(const std::vector<TrialRecord>& records,
                           const LossConfig& loss, double bin_width);

struct AblationCell {
  double lambda = 0.0;
  int trials = 0;
  int successes = 0;
  double success_ratio = 0.0;
  // Statistics of total strength sum_ij |W_ij| (and the signed sum) over
  // successful trials; NaN when no trial succeeded.
  double mean_total_strength = 0.0;
  double median_total_strength = 0.0;
  double mean_signed_sum = 0.0;
};

struct AblationResult {
  std::vector<AblationCell> cells;   // one per lambda, input order
  std::vector<TrialRecord> records;  // canonical order: lambda-major
};

// L1-coefficient ablation at a fixed size. Trial k uses the same seed under
// every lambda, so columns are matched pairs and the lambda = 0 column is
// exactly an unregularized run.
AblationResult l1_ablation(const std::vector<double>& lambdas, int size,
                           int trials, Trainer trainer,
                           std::uint64_t base_seed,
                           const TrialConfigs& configs, int workers = 1,
                           const RecordSink& on_record = {});

}  // namespace gcl
