// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
// Exit 0 iff every selected criterion passes. Pass criterion numbers as
// arguments to run a subset (default: all ten).
//
// Every tolerance, seed and budget is pinned here on purpose: the point of
// this binary is that the bar cannot drift without a visible diff.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gcl/analysis.hpp"
#include "gcl/experiments.hpp"
#include "gcl/oracles.hpp"
#include "gcl/rng.hpp"
#include "gcl/serialize.hpp"
#include "gcl/train_evo.hpp"
#include "gcl/train_gd.hpp"

using namespace gcl;

namespace {

// ---- pinned experiment identities ------------------------------------------
constexpr std::uint64_t kSmallNBase = 1001;   // criterion 4 (and 8)
constexpr std::uint64_t kSweepBase = 42;      // criterion 5 (and 10)
constexpr std::uint64_t kGaBase = 77;         // criterion 6
constexpr std::uint64_t kAblationBase = 7007; // criterion 7 (and 9)
constexpr std::uint64_t kTopUpBase = 7008;    // criterion 9 extra trials

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---- shared experiment contexts (lazy, built once) --------------------------

// Criterion 4 feeds criterion 8: 25 GD trials each at n = 3 and n = 4,
// library defaults, FF target.
const std::vector<TrialRecord>& small_n_records() {
  static const std::vector<TrialRecord> records = [] {
    const TrialConfigs tc;  // defaults throughout
    std::vector<TrialRecord> out;
    out.reserve(50);
    for (int n : {3, 4})
      for (int k = 0; k < 25; ++k)
        out.push_back(run_trial(n, k, trial_seed(kSmallNBase, n, k),
                                Trainer::GradientDescent, Regularization::None,
                                tc));
    return out;
  }();
  return records;
}

SweepConfig ladder_config() {
  SweepConfig sc;  // sizes {4,8,12,16,18}, 30 trials/size by default
  sc.base_seed = kSweepBase;
  return sc;
}

// Criterion 5 feeds criterion 10: the full ladder, serial reference run.
const SweepResult& ladder_sweep() {
  static const SweepResult res = learnability_sweep(ladder_config(), 1);
  return res;
}

// Criterion 7 feeds criterion 9.
const AblationResult& ablation() {
  static const AblationResult res =
      l1_ablation({0.0, 2e-3, 2e-2, 2e-1}, 7, 20, Trainer::GradientDescent,
                  kAblationBase, TrialConfigs{}, 1);
  return res;
}

// ---- criteria ----------------------------------------------------------------

bool c1_fixed_point(std::string& detail) {
  const GeneCircuit c(4);
  const SimConfig cfg;
  const SettleResult s = steady_state(c, 0.0, cfg);
  if (!s.converged) {
    detail = "no convergence";
    return false;
  }
  double worst_state = 0.0;
  for (int i = 0; i < 4; ++i)
    worst_state = std::max(worst_state, std::abs(s.state[i] - 0.5));
  const auto ev = eigenvalues(jacobian(c, s.state));
  double worst_eig = 0.0;
  for (const auto& z : ev)
    worst_eig = std::max(worst_eig, std::abs(z - std::complex<double>(-1, 0)));
  detail = fmt("|y-0.5| <= %.2e, |eig+1| <= %.2e", worst_state, worst_eig);
  return worst_state <= 1e-6 && worst_eig <= 1e-12;
}

bool c2_gradients(std::string& detail) {
  Rng rng(424242);
  SimConfig sim;
  sim.max_steps = 100;  // unroll depth of the production trainer
  const LossConfig loss;
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int n = 2 + rng.index(4);  // n in 2..5
    const GeneCircuit circ = GeneCircuit::random(n, 1.0, rng);
    for (TargetKind kind : {TargetKind::FrenchFlag, TargetKind::Switch}) {
      const TargetSpec target = kind == TargetKind::FrenchFlag
                                    ? TargetSpec::french_flag()
                                    : TargetSpec::switch_at();
      const LossAndGrad lg = loss_and_gradient(circ, target, sim, loss);
      const Matrix fd = finite_difference_gradient(circ, target, sim, loss);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double a = lg.grad(i, j), b = fd(i, j);
          const double rel =
              std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-7});
          worst = std::max(worst, rel);
        }
    }
  }
  detail = fmt("20 circuits x 2 targets, worst rel err %.2e", worst);
  return worst < 1e-4;
}

bool c3_oracles(std::string& detail) {
  const CheckResult eig = check_eigenvalues(50, 5);
  const CheckResult conn = check_connectivity(100, 6);
  detail = "eigen: " + eig.detail + " | connectivity: " + conn.detail;
  return eig.pass && conn.pass;
}

bool c4_small_n(std::string& detail) {
  const auto& records = small_n_records();
  int successes = 0;
  for (const auto& r : records) successes += r.success ? 1 : 0;
  detail = fmt("%d/50 trials learned FF at n=3-4", successes);
  return successes * 2 >= 50;  // >= 50%
}

bool c5_collapse(std::string& detail) {
  const auto& pts = ladder_sweep().curve.points;
  double r4 = 0, r12 = 0, r16 = 0, r18 = 0;
  std::string curve;
  for (const auto& pt : pts) {
    if (pt.size == 4) r4 = pt.ratio;
    if (pt.size == 12) r12 = pt.ratio;
    if (pt.size == 16) r16 = pt.ratio;
    if (pt.size == 18) r18 = pt.ratio;
    curve += fmt("%d:%.2f ", pt.size, pt.ratio);
  }
  const bool drop = r18 <= r4 - 0.40;
  // Non-increasing over 12 -> 16 -> 18, allowing one inversion of <= 0.1.
  int inversions = 0;
  double worst_inv = 0.0;
  for (double step : {r16 - r12, r18 - r16})
    if (step > 0.0) {
      ++inversions;
      worst_inv = std::max(worst_inv, step);
    }
  const bool tail_ok = inversions <= 1 && worst_inv <= 0.1;
  detail = fmt("ratios [ %s], drop %.2f (need >= 0.40), tail inversions %d (worst %.2f)",
               curve.c_str(), r4 - r18, inversions, worst_inv);
  return drop && tail_ok;
}

bool c6_ga(std::string& detail) {
  const TargetSpec target = TargetSpec::french_flag();
  const SimConfig sim;
  const LossConfig loss;
  int successes = 0;
  int monotone = 0;
  for (int k = 0; k < 20; ++k) {
    EvoConfig cfg;  // population 20, max 5000 generations by default
    cfg.rng_seed = trial_seed(kGaBase, 4, k);
    const TrainResult r = evolve(4, target, sim, cfg, loss);
    successes += r.success ? 1 : 0;
    bool mono = true;
    for (std::size_t i = 1; i < r.loss_history.size(); ++i)
      mono = mono && r.loss_history[i] <= r.loss_history[i - 1];
    monotone += mono ? 1 : 0;
  }
  detail = fmt("%d/20 seeds learned (need >= 6), %d/20 monotone elites (need 20)",
               successes, monotone);
  return successes >= 6 && monotone == 20;
}

bool c7_l1_direction(std::string& detail) {
  const auto& res = ablation();
  const auto col = [&](double lambda) -> const AblationCell* {
    for (const auto& c : res.cells)
      if (c.lambda == lambda) return &c;
    return nullptr;
  };
  const AblationCell* c0 = col(0.0);
  const AblationCell* c2 = col(2e-2);
  const AblationCell* c3 = col(2e-1);
  const int trials = c0->trials;

  std::vector<double> s0, s2;
  for (int k = 0; k < trials; ++k) {
    const TrialRecord& a = res.records[0 * trials + k];      // lambda = 0
    const TrialRecord& b = res.records[2 * trials + k];      // lambda = 2e-2
    if (a.success && b.success) {
      s0.push_back(a.circuit.l1_norm());
      s2.push_back(b.circuit.l1_norm());
    }
  }
  if (s0.empty()) {
    // Report enough to show this is a property of the pinned objective, not
    // a harness accident: at lambda=2e-2 the penalty at functional weight
    // scale exceeds the whole MSE range, so training lands on the trivial
    // circuit (tiny total strength) for every seed.
    double mean_s2 = 0.0;
    for (int k = 0; k < trials; ++k)
      mean_s2 += res.records[2 * trials + k].circuit.l1_norm();
    mean_s2 /= trials;
    detail = fmt("no seed succeeded under both lambdas: ratios %.2f/%.2f/%.2f/%.2f "
                 "at l=0/2e-3/2e-2/2e-1; l=2e-2 runs collapse to mean |W| %.2f",
                 c0->success_ratio, col(2e-3)->success_ratio, c2->success_ratio,
                 c3->success_ratio, mean_s2);
    return false;
  }
  const double m0 = median_of(s0), m2 = median_of(s2);
  const bool shrink = m2 < m0;
  const bool underfit = c3->success_ratio <= c2->success_ratio;
  detail = fmt("%zu matched pairs, median |W|: %.2f (l=2e-2) vs %.2f (l=0); "
               "ratio %.2f (l=2e-1) vs %.2f (l=2e-2)",
               s0.size(), m2, m0, c3->success_ratio, c2->success_ratio);
  return shrink && underfit;
}

bool c8_stability(std::string& detail) {
  std::vector<const TrialRecord*> winners;
  for (const auto& r : small_n_records())
    if (r.success) winners.push_back(&r);
  if (winners.empty()) {
    detail = "criterion 4 produced no successful circuits to inspect";
    return false;
  }
  const TrialConfigs tc;
  int stable = 0, probed = 0, returned = 0;
  for (const TrialRecord* r : winners) {
    if (r->stability && r->stability->max_real_part < 0.0) ++stable;
    if (r->stability && r->stability->max_real_part < -0.05) {
      ++probed;
      if (perturb_and_return(r->circuit, r->stability->fixed_point,
                             tc.analysis.reference_input, tc.sim, r->seed))
        ++returned;
    }
  }
  const double frac = static_cast<double>(stable) / winners.size();
  detail = fmt("%d/%zu winners stable (%.0f%%, need >= 90%%); "
               "perturb-and-return %d/%d",
               stable, winners.size(), 100.0 * frac, returned, probed);
  return frac >= 0.90 && returned == probed;
}

bool c9_pruning(std::string& detail) {
  // Population: successful n=7 circuits. Regularized columns produce none
  // (see criterion 7), so the harvest comes from the ablation's lambda=0
  // column, topped up with fresh plain-GD trials until 10 winners or 40
  // total attempts.
  const TrialConfigs tc;
  std::vector<GeneCircuit> winners;
  const auto& res = ablation();
  const int trials = res.cells[0].trials;
  for (int k = 0; k < trials; ++k) {
    const TrialRecord& r = res.records[0 * trials + k];  // lambda = 0 column
    if (r.success) winners.push_back(r.circuit);
  }
  int attempts = trials;
  for (int k = 0; winners.size() < 10 && attempts < 40; ++k, ++attempts) {
    const TrialRecord r = run_trial(7, k, trial_seed(kTopUpBase, 7, k),
                                    Trainer::GradientDescent,
                                    Regularization::None, tc);
    if (r.success) winners.push_back(r.circuit);
  }
  if (winners.empty()) {
    detail = fmt("no successful n=7 circuits in %d attempts", attempts);
    return false;
  }

  const auto grid = sample_grid(tc.target);
  const Vector targets = target_vector(tc.target);
  int preserved = 0;
  for (const GeneCircuit& c : winners) {
    const GeneCircuit p = prune(c, 0.1);
    try {
      const Matrix curve = response_curve(p, grid, tc.sim);
      if (curve.allFinite() &&
          mse(curve.col(p.n - 1), targets) <= 2.0 * tc.loss.success_mse)
        ++preserved;
    } catch (const NonFiniteState&) {
    }
  }
  const double frac = static_cast<double>(preserved) / winners.size();
  detail = fmt("%d/%zu pruned circuits stay under doubled mse (%.0f%%, need >= 70%%; "
               "%d attempts)",
               preserved, winners.size(), 100.0 * frac, attempts);
  return frac >= 0.70;
}

bool c10_determinism(std::string& detail) {
  const auto lines = [](const std::vector<TrialRecord>& records) {
    std::vector<std::string> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(trial_record_to_json(r));
    return out;
  };

  const std::vector<std::string> serial = lines(ladder_sweep().records);
  const std::vector<std::string> parallel =
      lines(learnability_sweep(ladder_config(), 8).records);

  std::vector<std::string> serial_sorted = serial, parallel_sorted = parallel;
  std::sort(serial_sorted.begin(), serial_sorted.end());
  std::sort(parallel_sorted.begin(), parallel_sorted.end());
  const bool par_eq = serial_sorted == parallel_sorted;
  const bool par_eq_ordered = serial == parallel;

  // Same-seed rerun (cheap column) must be byte-identical.
  SweepConfig small = ladder_config();
  small.sizes = {4};
  const std::vector<std::string> rep1 = lines(learnability_sweep(small, 1).records);
  const std::vector<std::string> rep2 = lines(learnability_sweep(small, 1).records);
  const bool rerun_eq = rep1 == rep2;

  detail = fmt("workers 1 vs 8: %s (order-normalized)%s; same-seed rerun: %s",
               par_eq ? "identical" : "DIFFER",
               par_eq_ordered ? ", already in identical order" : "",
               rerun_eq ? "identical" : "DIFFER");
  return par_eq && rerun_eq;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // from the acceptance list; 0 = no own budget
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "analytic fixed point", 1, c1_fixed_point},
      {2, "gradient vs finite differences", 60, c2_gradients},
      {3, "eigen + connectivity oracles", 60, c3_oracles},
      {4, "small-N learnability (GD, FF)", 600, c4_small_n},
      {5, "learnability collapse by n=18", 7200, c5_collapse},
      {6, "GA viability at n=4", 1800, c6_ga},
      {7, "L1 shrinks weights, 2e-1 underfits", 1200, c7_l1_direction},
      {8, "winners are stable fixed points", 0, c8_stability},
      {9, "pruning keeps n=7 winners working", 600, c9_pruning},
      {10, "parallel == serial, rerun == run", 0, c10_determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int ran = 0, passed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    if (ok && c.budget_s > 0 && secs > c.budget_s) {
      ok = false;
      detail += fmt(" [over %.0fs budget]", c.budget_s);
    }
    passed += ok ? 1 : 0;
    std::printf("[%2d] %-38s %s (%.1fs) %s\n", c.id, c.name,
                ok ? "PASS" : "FAIL", secs, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("ACCEPTANCE: %s (%d/%d criteria)\n",
              passed == ran ? "PASS" : "FAIL", passed, ran);
  return passed == ran ? 0 : 1;
}
