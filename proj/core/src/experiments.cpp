#include "gcl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <thread>

namespace gcl {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* regularization_name(Regularization r) {
  switch (r) {
    case Regularization::None: return "none";
    case Regularization::L1: return "l1";
    case Regularization::L1Pruned: return "l1_pruned";
  }
  return "?";
}

Regularization regularization_from_name(std::string_view name) {
  if (name == "none") return Regularization::None;
  if (name == "l1") return Regularization::L1;
  if (name == "l1_pruned") return Regularization::L1Pruned;
  throw std::invalid_argument("unknown regularization '" + std::string(name) +
                              "'");
}

void AnalysisParams::validate() const {
  if (!std::isfinite(reference_input))
    throw std::invalid_argument("AnalysisParams: reference_input not finite");
  if (!(edge_tau >= 0.0))
    throw std::invalid_argument("AnalysisParams: edge_tau must be >= 0");
  if (!(bin_width > 0.0))
    throw std::invalid_argument("AnalysisParams: bin_width must be > 0");
  if (!(prune_tau >= 0.0))
    throw std::invalid_argument("AnalysisParams: prune_tau must be >= 0");
}

void TrialConfigs::validate() const {
  target.validate();
  sim.validate();
  loss.validate();
  gd.validate();
  evo.validate();
  analysis.validate();
}

void SweepConfig::validate() const {
  configs.validate();
  if (sizes.empty()) throw std::invalid_argument("SweepConfig: no sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2)
      throw std::invalid_argument("SweepConfig: sizes must be >= 2");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("SweepConfig: sizes must be strictly ascending");
  }
  if (trials_per_size < 1)
    throw std::invalid_argument("SweepConfig: trials_per_size must be >= 1");
}

namespace {

// Shared analysis battery: evaluate the stored circuit, then attach the
// structural and stability summaries. Sets final_mse/success/diverged/team
// plus strength/feedback/histogram/connectivity/stability on rec.
void fill_analysis(TrialRecord& rec, const TrialConfigs& tc) {
  const int n = rec.circuit.n;
  const auto grid = sample_grid(tc.target);
  try {
    const Matrix curve = response_curve(rec.circuit, grid, tc.sim);
    if (curve.allFinite()) {
      rec.final_mse = mse(curve.col(n - 1), target_vector(tc.target));
      rec.success = rec.final_mse <= tc.loss.success_mse;
      rec.team = team_metrics(curve, tc.target);
    } else {
      rec.final_mse = kNaN;
      rec.diverged = true;
    }
  } catch (const NonFiniteState&) {
    rec.final_mse = kNaN;
    rec.diverged = true;
  }

  rec.strength = node_strength(rec.circuit);
  rec.feedback = feedback_sum(rec.circuit);
  rec.histogram = weight_sign_histogram(rec.circuit, tc.analysis.bin_width);
  rec.edge_conn =
      edge_connectivity(binarize(rec.circuit, tc.analysis.edge_tau));
  try {
    rec.stability =
        stability_report(rec.circuit, tc.analysis.reference_input, tc.sim);
  } catch (const NotConverged&) {
  } catch (const NonFiniteState&) {
  }
}

}  // namespace

TrialRecord analyze_circuit(const GeneCircuit& circuit,
                            const TrialConfigs& configs) {
  circuit.validate();
  TrialRecord rec;
  rec.size = circuit.n;
  rec.circuit = circuit;
  fill_analysis(rec, configs);
  return rec;
}

TrialRecord run_trial(int size, int trial_index, std::uint64_t seed,
                      Trainer trainer, Regularization reg,
                      const TrialConfigs& configs) {
  TrialConfigs tc = configs;
  if (reg == Regularization::None) tc.loss.l1_lambda = 0.0;

  TrialRecord rec;
  rec.size = size;
  rec.trial = trial_index;
  rec.seed = seed;
  rec.trainer = trainer;
  rec.regularization = reg;
  rec.l1_lambda = tc.loss.l1_lambda;

  TrainResult tr;
  try {
    if (trainer == Trainer::Evolutionary) {
      EvoConfig evo = tc.evo;
      evo.rng_seed = seed;
      tr = evolve(size, tc.target, tc.sim, evo, tc.loss);
    } else {
      GdConfig gd = tc.gd;
      gd.rng_seed = seed;
      if (trainer == Trainer::HybridMutatedGd) {
        if (gd.mutation_rate <= 0.0)
          gd.mutation_rate = 0.5 / (static_cast<double>(size) * size);
      } else {
        gd.mutation_rate = 0.0;
      }
      tr = train_gd(size, tc.target, tc.sim, gd, tc.loss);
    }
  } catch (const NonFiniteState&) {
    // Pathological blow-up before the first iterate could be recorded.
    rec.diverged = true;
    rec.final_mse = kNaN;
    rec.circuit = GeneCircuit(size);
    rec.strength = node_strength(rec.circuit);
    rec.feedback = feedback_sum(rec.circuit);
    rec.histogram = weight_sign_histogram(rec.circuit, tc.analysis.bin_width);
    return rec;
  }

  if (reg == Regularization::L1Pruned)
    tr.circuit = prune(tr.circuit, tc.analysis.prune_tau);

  rec.iterations = tr.iterations_used;
  rec.loss_history = std::move(tr.loss_history);
  rec.circuit = std::move(tr.circuit);

  // Authoritative evaluation of the stored circuit (it may have been pruned
  // after training, so the train-time verdict is not reused).
  fill_analysis(rec, tc);
  if (tr.diverged) rec.diverged = true;
  return rec;
}

namespace {

// Run `total` independent jobs on `workers` threads and hand the results to
// `commit` strictly in index order. With workers <= 1 everything happens on
// the calling thread; either way the committed sequence is identical, which
// is what makes sweep outputs independent of parallelism.
void ordered_parallel_run(int total, int workers,
                          const std::function<TrialRecord(int)>& job,
                          const std::function<void(int, TrialRecord&&)>& commit) {
  if (workers <= 1) {
    for (int i = 0; i < total; ++i) commit(i, job(i));
    return;
  }
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<TrialRecord>> done(total);
  std::exception_ptr failure;
  std::atomic<int> next{0};

  const auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= total) return;
      try {
        TrialRecord rec = job(i);
        std::lock_guard lock(mu);
        done[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        done[i] = TrialRecord{};  // unblock the committer
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  const int nthreads = std::min(workers, total);
  pool.reserve(nthreads);
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);

  {
    std::unique_lock lock(mu);
    for (int i = 0; i < total; ++i) {
      cv.wait(lock, [&] { return done[i].has_value(); });
      if (!failure) {
        TrialRecord rec = std::move(*done[i]);
        done[i].reset();
        lock.unlock();
        commit(i, std::move(rec));
        lock.lock();
      }
    }
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepResult learnability_sweep(const SweepConfig& cfg, int workers,
                               const RecordSink& on_record) {
  cfg.validate();
  const int per = cfg.trials_per_size;
  const int total = static_cast<int>(cfg.sizes.size()) * per;

  SweepResult result;
  result.records.reserve(total);

  const auto job = [&](int idx) {
    const int size = cfg.sizes[static_cast<std::size_t>(idx / per)];
    const int trial = idx % per;
    return run_trial(size, trial, trial_seed(cfg.base_seed, size, trial),
                     cfg.trainer, cfg.regularization, cfg.configs);
  };
  const auto commit = [&](int, TrialRecord&& rec) {
    if (on_record) on_record(rec);
    result.records.push_back(std::move(rec));
  };
  ordered_parallel_run(total, workers, job, commit);

  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    SizePoint pt;
    pt.size = cfg.sizes[s];
    pt.trials = per;
    for (int k = 0; k < per; ++k)
      pt.successes += result.records[s * per + k].success ? 1 : 0;
    pt.ratio = static_cast<double>(pt.successes) / per;
    result.curve.points.push_back(pt);
  }
  const double base_ratio = result.curve.points.front().ratio;
  for (const SizePoint& pt : result.curve.points)
    if (pt.ratio < 0.5 * base_ratio) {
      result.curve.threshold_size = pt.size;
      break;
    }
  return result;
}

SignStudy sign_shift_study(const std::vector<TrialRecord>& records,
                           const LossConfig& loss, double bin_width) {
  SignStudy study;
  const double cutoff = study.near_success_factor * loss.success_mse;

  std::vector<int> sizes;
  for (const auto& r : records) sizes.push_back(r.size);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  for (int size : sizes) {
    SignStudyEntry entry;
    entry.size = size;
    std::vector<double> pooled;
    for (const auto& r : records) {
      if (r.size != size || r.diverged) continue;
      if (!(r.final_mse <= cutoff)) continue;  // NaN-safe: keeps finite only
      ++entry.trials_used;
      for (int i = 0; i < r.circuit.n; ++i)
        for (int j = 0; j < r.circuit.n; ++j)
          pooled.push_back(r.circuit.weights(i, j));
    }
    entry.histogram = histogram_from_values(pooled, bin_width);
    study.entries.push_back(std::move(entry));
  }
  return study;
}

AblationResult l1_ablation(const std::vector<double>& lambdas, int size,
                           int trials, Trainer trainer,
                           std::uint64_t base_seed,
                           const TrialConfigs& configs, int workers,
                           const RecordSink& on_record) {
  if (lambdas.empty())
    throw std::invalid_argument("l1_ablation: no lambdas given");
  if (size < 2) throw std::invalid_argument("l1_ablation: size must be >= 2");
  if (trials < 1) throw std::invalid_argument("l1_ablation: trials must be >= 1");
  configs.validate();

  const int total = static_cast<int>(lambdas.size()) * trials;
  AblationResult result;
  result.records.reserve(total);

  const auto job = [&](int idx) {
    const double lambda = lambdas[static_cast<std::size_t>(idx / trials)];
    const int trial = idx % trials;
    TrialConfigs tc = configs;
    tc.loss.l1_lambda = lambda;
    // Matched pairs: trial k gets the same seed under every lambda.
    return run_trial(size, trial, trial_seed(base_seed, size, trial), trainer,
                     lambda == 0.0 ? Regularization::None : Regularization::L1,
                     tc);
  };
  const auto commit = [&](int, TrialRecord&& rec) {
    if (on_record) on_record(rec);
    result.records.push_back(std::move(rec));
  };
  ordered_parallel_run(total, workers, job, commit);

  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    AblationCell cell;
    cell.lambda = lambdas[li];
    cell.trials = trials;
    std::vector<double> strengths;
    double signed_acc = 0.0;
    for (int k = 0; k < trials; ++k) {
      const TrialRecord& r = result.records[li * trials + k];
      if (!r.success) continue;
      ++cell.successes;
      strengths.push_back(r.circuit.l1_norm());
      signed_acc += r.circuit.weights.sum();
    }
    cell.success_ratio = static_cast<double>(cell.successes) / trials;
    if (cell.successes > 0) {
      double sum = 0.0;
      for (double v : strengths) sum += v;
      cell.mean_total_strength = sum / cell.successes;
      cell.mean_signed_sum = signed_acc / cell.successes;
      std::sort(strengths.begin(), strengths.end());
      const std::size_t mid = strengths.size() / 2;
      cell.median_total_strength =
          strengths.size() % 2 ? strengths[mid]
                               : 0.5 * (strengths[mid - 1] + strengths[mid]);
    } else {
      cell.mean_total_strength = kNaN;
      cell.median_total_strength = kNaN;
      cell.mean_signed_sum = kNaN;
    }
    result.cells.push_back(cell);
  }
  return result;
}

}  // namespace gcl
