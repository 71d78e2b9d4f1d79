#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gcl/circuit.hpp"
#include "gcl/experiments.hpp"

namespace gcl {

// Bad or missing configuration / input files. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output-side I/O failure. CLI maps this to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest representation that parses back to the identical double ("%.17g").
std::string format_double(double v);

// Provenance stored alongside a circuit on disk.
struct CircuitMeta {
  std::uint64_t seed = 0;
  std::string trainer;
  std::string target;
};

// Circuit file format: {"n": ..., "weights": [[row 0], [row 1], ...],
// "meta": {"seed": ..., "trainer": ..., "target": ...}}. Weights survive a
// round trip bit-exactly for every finite double.
std::string circuit_to_json(const GeneCircuit& circuit, const CircuitMeta& meta);
std::pair<GeneCircuit, CircuitMeta> circuit_from_json(const std::string& text);

void save_circuit(const std::string& path, const GeneCircuit& circuit,
                  const CircuitMeta& meta);  // throws IoError
std::pair<GeneCircuit, CircuitMeta> load_circuit(
    const std::string& path);  // throws ConfigError

// One-line JSON for a trial record (keys sorted, no whitespace) -- the
// records.jsonl line format. Round-trips exactly.
std::string trial_record_to_json(const TrialRecord& rec);
TrialRecord trial_record_from_json(const std::string& line);

// Append-only JSONL file where each line lands in a single write() call, so
// a killed process can leave at most a missing suffix, never a torn line.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);  // creates/truncates
  ~JsonlWriter();
  JsonlWriter(const JsonlWriter&) = delete;
  JsonlWriter& operator=(const JsonlWriter&) = delete;

  void write_record(const std::string& json_line);  // throws IoError
  const std::string& path() const { return path_; }

 private:
  int fd_ = -1;
  std::string path_;
};

// Full tool configuration: one circuit-level bundle plus experiment routing.
struct RunConfig {
  int n = 4;
  TrialConfigs configs;

  // sweep section
  std::vector<int> sweep_sizes = {4, 8, 12, 16, 18};
  int trials_per_size = 30;
  Trainer sweep_trainer = Trainer::GradientDescent;
  std::uint64_t base_seed = 1;
  Regularization regularization = Regularization::None;
  std::string study = "learnability";  // or "ablation"
  std::vector<double> ablation_lambdas = {0.0, 2e-3, 2e-2, 2e-1};
  int ablation_size = 7;
  int ablation_trials = 20;

  void validate() const;  // throws ConfigError
};

SweepConfig make_sweep_config(const RunConfig& rc);

// Parse a config. Missing keys fall back to defaults; unknown keys are
// rejected (typo protection). `overrides` entries look like
// "gd.max_iters=500" with the value parsed as JSON (bare words fall back to
// strings). All failures throw ConfigError naming the offending part.
RunConfig run_config_from_json(const std::string& text,
                               const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// Fully resolved config echo (every field explicit), pretty-printed.
std::string run_config_to_json(const RunConfig& rc);

}  // namespace gcl
