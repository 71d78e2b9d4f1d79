#include <cmath>
#include <set>

#include "doctest.h"
#include "gcl/experiments.hpp"
#include "gcl/rng.hpp"
#include "gcl/serialize.hpp"

using namespace gcl;

namespace {

// Small-budget configs so a trial costs milliseconds, not seconds.
TrialConfigs quick_configs() {
  TrialConfigs tc;
  tc.gd.max_iters = 8;
  tc.gd.unroll_steps = 40;
  tc.evo.population_size = 6;
  tc.evo.max_generations = 6;
  return tc;
}

std::string lines_of(const std::vector<TrialRecord>& records) {
  std::string all;
  for (const auto& r : records) {
    all += trial_record_to_json(r);
    all += '\n';
  }
  return all;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("regularization names round trip") {
  for (Regularization r :
       {Regularization::None, Regularization::L1, Regularization::L1Pruned})
    CHECK(regularization_from_name(regularization_name(r)) == r);
  CHECK(regularization_name(Regularization::L1Pruned) ==
        std::string("l1_pruned"));
  CHECK_THROWS_AS(regularization_from_name("l2"), std::invalid_argument);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(quick_configs().validate());
  {
    TrialConfigs tc = quick_configs();
    tc.analysis.bin_width = 0.0;
    CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
  }
  {
    TrialConfigs tc = quick_configs();
    tc.analysis.edge_tau = -1.0;
    CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
  }
  {
    SweepConfig sc;
    sc.configs = quick_configs();
    CHECK_NOTHROW(sc.validate());
    sc.sizes = {4, 4};
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.sizes = {8, 4};
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.sizes = {1, 4};
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.sizes = {};
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.sizes = {4};
    sc.trials_per_size = 0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  }
}

TEST_CASE("trial seeds are deterministic and collision-free in practice") {
  CHECK(trial_seed(1, 4, 0) == trial_seed(1, 4, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {1ull, 42ull})
    for (int size : {4, 8, 12, 16, 18})
      for (int k = 0; k < 30; ++k) seen.insert(trial_seed(base, size, k));
  CHECK(seen.size() == 2u * 5u * 30u);
  CHECK(trial_seed(1, 4, 0) != trial_seed(2, 4, 0));
  CHECK(trial_seed(1, 4, 0) != trial_seed(1, 5, 0));
  CHECK(trial_seed(1, 4, 0) != trial_seed(1, 4, 1));
}

TEST_CASE("run_trial: field echo, determinism, regularization handling") {
  TrialConfigs tc = quick_configs();
  tc.loss.l1_lambda = 0.1;
  const std::uint64_t seed = trial_seed(9, 3, 0);

  const TrialRecord a =
      run_trial(3, 0, seed, Trainer::GradientDescent, Regularization::None, tc);
  CHECK(a.size == 3);
  CHECK(a.trial == 0);
  CHECK(a.seed == seed);
  CHECK(a.trainer == Trainer::GradientDescent);
  CHECK(a.regularization == Regularization::None);
  CHECK(a.l1_lambda == 0.0);  // None overrides the configured lambda
  CHECK(a.circuit.n == 3);
  CHECK((a.iterations == static_cast<int>(a.loss_history.size()) ||
         a.iterations + 1 == static_cast<int>(a.loss_history.size())));

  const TrialRecord b =
      run_trial(3, 0, seed, Trainer::GradientDescent, Regularization::None, tc);
  CHECK(trial_record_to_json(a) == trial_record_to_json(b));

  const TrialRecord c =
      run_trial(3, 0, seed, Trainer::GradientDescent, Regularization::L1, tc);
  CHECK(c.l1_lambda == 0.1);
  CHECK(c.regularization == Regularization::L1);
}

TEST_CASE("run_trial re-evaluates the stored circuit") {
  TrialConfigs tc = quick_configs();
  const TrialRecord rec = run_trial(3, 1, trial_seed(5, 3, 1),
                                    Trainer::GradientDescent,
                                    Regularization::None, tc);
  REQUIRE(!rec.diverged);
  const Matrix curve =
      response_curve(rec.circuit, sample_grid(tc.target), tc.sim);
  CHECK(rec.final_mse == mse(curve.col(2), target_vector(tc.target)));
  CHECK(rec.success == (rec.final_mse <= tc.loss.success_mse));
  CHECK(rec.strength == node_strength(rec.circuit));
  CHECK(rec.feedback == feedback_sum(rec.circuit));
  REQUIRE(rec.team.has_value());
  REQUIRE(rec.stability.has_value());  // small random circuits settle
}

TEST_CASE("run_trial with the evolutionary trainer") {
  TrialConfigs tc = quick_configs();
  const std::uint64_t seed = trial_seed(2, 3, 4);
  const TrialRecord a =
      run_trial(3, 4, seed, Trainer::Evolutionary, Regularization::None, tc);
  const TrialRecord b =
      run_trial(3, 4, seed, Trainer::Evolutionary, Regularization::None, tc);
  CHECK(a.trainer == Trainer::Evolutionary);
  CHECK(a.iterations == static_cast<int>(a.loss_history.size()));
  CHECK(trial_record_to_json(a) == trial_record_to_json(b));
}

TEST_CASE("hybrid trainer diverges from plain descent on the same seed") {
  TrialConfigs tc = quick_configs();
  const std::uint64_t seed = trial_seed(3, 3, 0);
  const TrialRecord gd = run_trial(3, 0, seed, Trainer::GradientDescent,
                                   Regularization::None, tc);
  const TrialRecord hy = run_trial(3, 0, seed, Trainer::HybridMutatedGd,
                                   Regularization::None, tc);
  CHECK(hy.trainer == Trainer::HybridMutatedGd);
  CHECK(gd.circuit.weights != hy.circuit.weights);
}

TEST_CASE("L1Pruned stores the pruned circuit") {
  TrialConfigs tc = quick_configs();
  tc.loss.l1_lambda = 0.02;
  const std::uint64_t seed = trial_seed(11, 3, 2);
  const TrialRecord plain =
      run_trial(3, 2, seed, Trainer::GradientDescent, Regularization::L1, tc);
  const TrialRecord pruned = run_trial(3, 2, seed, Trainer::GradientDescent,
                                       Regularization::L1Pruned, tc);
  CHECK(pruned.circuit.weights ==
        prune(plain.circuit, tc.analysis.prune_tau).weights);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double w = std::abs(pruned.circuit.weights(i, j));
      CHECK((w == 0.0 || w >= tc.analysis.prune_tau));
    }
  // The analysis battery ran on the pruned circuit, not the raw one.
  CHECK(pruned.strength == node_strength(pruned.circuit));
}

TEST_CASE("run_trial survives an immediately divergent setup") {
  TrialConfigs tc = quick_configs();
  tc.sim.dt = 5.0;
  tc.gd.unroll_steps = 600;
  const TrialRecord rec = run_trial(2, 0, 1, Trainer::GradientDescent,
                                    Regularization::None, tc);
  CHECK(rec.diverged);
  CHECK(std::isnan(rec.final_mse));
  CHECK(!rec.success);
  CHECK(rec.circuit.weights.isZero(0.0));
  CHECK(rec.loss_history.empty());
}

TEST_CASE("analyze_circuit on the zero circuit: frozen values") {
  const TrialRecord rec = analyze_circuit(GeneCircuit(3), quick_configs());
  CHECK(rec.size == 3);
  CHECK(rec.final_mse == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(!rec.success);
  CHECK(!rec.diverged);
  CHECK(rec.strength.isZero(0.0));
  CHECK(rec.feedback.isZero(0.0));
  REQUIRE(rec.histogram.counts.size() == 2);
  CHECK(rec.histogram.counts[1] == 9);
  CHECK(rec.edge_conn == 0);
  REQUIRE(rec.stability.has_value());
  CHECK(rec.stability->stable);
  CHECK(rec.stability->max_real_part == doctest::Approx(-1.0).epsilon(1e-9));
  REQUIRE(rec.team.has_value());
  CHECK(rec.team->classification == TeamClass::Mixed);
  // Hidden-node curves here are only *nearly* constant (the settle loop
  // stops after an x-dependent number of steps), so conformity is small but
  // not pinned to zero; exact-zero handling is covered synthetically in the
  // analysis suite.
  CHECK(std::abs(rec.team->per_node[1].conformity) < 0.5);
}

TEST_CASE("learnability sweep: canonical order, seeds, parallel equivalence") {
  SweepConfig sc;
  sc.sizes = {2, 3};
  sc.trials_per_size = 3;
  sc.base_seed = 7;
  sc.configs = quick_configs();

  std::vector<TrialRecord> streamed;
  const SweepResult serial =
      learnability_sweep(sc, 1, [&](const TrialRecord& r) {
        streamed.push_back(r);
      });

  REQUIRE(serial.records.size() == 6);
  int idx = 0;
  for (int size : {2, 3})
    for (int k = 0; k < 3; ++k, ++idx) {
      CHECK(serial.records[idx].size == size);
      CHECK(serial.records[idx].trial == k);
      CHECK(serial.records[idx].seed == trial_seed(7, size, k));
    }
  CHECK(lines_of(streamed) == lines_of(serial.records));

  REQUIRE(serial.curve.points.size() == 2);
  for (int s = 0; s < 2; ++s) {
    const SizePoint& pt = serial.curve.points[s];
    CHECK(pt.trials == 3);
    int succ = 0;
    for (int k = 0; k < 3; ++k) succ += serial.records[s * 3 + k].success;
    CHECK(pt.successes == succ);
    CHECK(pt.ratio == doctest::Approx(succ / 3.0));
  }

  const SweepResult parallel = learnability_sweep(sc, 3);
  CHECK(lines_of(parallel.records) == lines_of(serial.records));
  CHECK(parallel.curve.threshold_size == serial.curve.threshold_size);
}

TEST_CASE("threshold stays unset without a collapse") {
  SweepConfig sc;
  sc.sizes = {2, 3};
  sc.trials_per_size = 2;
  sc.configs = quick_configs();
  sc.configs.gd.max_iters = 1;  // nobody learns anything: all ratios equal
  const SweepResult res = learnability_sweep(sc, 1);
  CHECK(!res.curve.threshold_size.has_value());
}

TEST_CASE("sign shift study pools near-successful circuits per size") {
  LossConfig loss;  // success_mse 0.05 -> cutoff 0.1
  const auto mk = [](int size, double mse_value, bool diverged, double w) {
    TrialRecord r;
    r.size = size;
    r.final_mse = mse_value;
    r.diverged = diverged;
    r.circuit = GeneCircuit(size);
    r.circuit.weights.setConstant(w);
    return r;
  };
  std::vector<TrialRecord> records;
  records.push_back(mk(3, 0.02, false, 0.6));   // included, size 3
  records.push_back(mk(2, 0.04, false, 1.0));   // included
  records.push_back(mk(2, 0.09, false, -1.0));  // near-success: included
  records.push_back(mk(2, 0.11, false, 9.0));   // too lossy: excluded
  records.push_back(
      mk(2, std::numeric_limits<double>::quiet_NaN(), true, 9.0));  // excluded

  const SignStudy study = sign_shift_study(records, loss, 0.5);
  REQUIRE(study.entries.size() == 2);
  CHECK(study.entries[0].size == 2);
  CHECK(study.entries[0].trials_used == 2);
  std::int64_t total = 0;
  for (auto c : study.entries[0].histogram.counts) total += c;
  CHECK(total == 8);  // two 2x2 genomes
  CHECK(study.entries[0].histogram.negative_fraction == doctest::Approx(0.5));
  CHECK(study.entries[1].size == 3);
  CHECK(study.entries[1].trials_used == 1);

  // A size whose every trial is excluded still appears, with empty bins.
  std::vector<TrialRecord> thin = {mk(4, 0.5, false, 1.0)};
  const SignStudy empty = sign_shift_study(thin, loss, 0.5);
  REQUIRE(empty.entries.size() == 1);
  CHECK(empty.entries[0].trials_used == 0);
  CHECK(empty.entries[0].histogram.counts.empty());
}

TEST_CASE("l1 ablation: matched seeds, lambda columns, cell statistics") {
  TrialConfigs tc = quick_configs();
  const std::vector<double> lambdas = {0.0, 0.02};
  const AblationResult res =
      l1_ablation(lambdas, 3, 2, Trainer::GradientDescent, 13, tc, 1);

  REQUIRE(res.records.size() == 4);
  REQUIRE(res.cells.size() == 2);
  for (int li = 0; li < 2; ++li)
    for (int k = 0; k < 2; ++k) {
      const TrialRecord& r = res.records[li * 2 + k];
      CHECK(r.size == 3);
      CHECK(r.trial == k);
      CHECK(r.seed == trial_seed(13, 3, k));  // matched across lambdas
      CHECK(r.l1_lambda == lambdas[li]);
      CHECK(r.regularization ==
            (li == 0 ? Regularization::None : Regularization::L1));
    }

  // The lambda = 0 column is exactly an unregularized run.
  const TrialRecord plain = run_trial(3, 0, trial_seed(13, 3, 0),
                                      Trainer::GradientDescent,
                                      Regularization::None, tc);
  CHECK(trial_record_to_json(res.records[0]) == trial_record_to_json(plain));

  for (int li = 0; li < 2; ++li) {
    const AblationCell& cell = res.cells[li];
    CHECK(cell.lambda == lambdas[li]);
    CHECK(cell.trials == 2);
    int succ = 0;
    double acc = 0.0;
    for (int k = 0; k < 2; ++k)
      if (res.records[li * 2 + k].success) {
        ++succ;
        acc += res.records[li * 2 + k].circuit.l1_norm();
      }
    CHECK(cell.successes == succ);
    CHECK(cell.success_ratio == doctest::Approx(succ / 2.0));
    if (succ == 0) {
      CHECK(std::isnan(cell.mean_total_strength));
      CHECK(std::isnan(cell.median_total_strength));
      CHECK(std::isnan(cell.mean_signed_sum));
    } else {
      CHECK(cell.mean_total_strength == doctest::Approx(acc / succ));
    }
  }

  const AblationResult par =
      l1_ablation(lambdas, 3, 2, Trainer::GradientDescent, 13, tc, 2);
  CHECK(lines_of(par.records) == lines_of(res.records));

  CHECK_THROWS_AS(l1_ablation({}, 3, 2, Trainer::GradientDescent, 1, tc),
                  std::invalid_argument);
  CHECK_THROWS_AS(l1_ablation({0.0}, 1, 2, Trainer::GradientDescent, 1, tc),
                  std::invalid_argument);
  CHECK_THROWS_AS(l1_ablation({0.0}, 3, 0, Trainer::GradientDescent, 1, tc),
                  std::invalid_argument);
}

TEST_SUITE_END();
