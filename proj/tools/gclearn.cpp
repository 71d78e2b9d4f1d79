// gclearn -- train, evolve, sweep, and dissect gene-circuit weight matrices.
//
// Exit codes: 0 done, 1 verification failure (or unexpected error),
//             2 bad configuration or input file, 3 output/filesystem problem.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gcl/analysis.hpp"
#include "gcl/experiments.hpp"
#include "gcl/oracles.hpp"
#include "gcl/serialize.hpp"
#include "gcl/sim.hpp"
#include "gcl/train_evo.hpp"
#include "gcl/train_gd.hpp"

namespace fs = std::filesystem;
using namespace gcl;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool force = false;
  int workers = 1;
};

void add_config_options(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* copt = cmd->add_option("-c,--config", args.config_path,
                               "JSON config file (defaults apply when omitted)");
  if (config_required) copt->required();
  cmd->add_option("-o,--out", args.out_dir, "output directory")->required();
  cmd->add_option("--set", args.overrides,
                  "override a config key, e.g. --set gd.max_iters=500");
  cmd->add_flag("--force", args.force, "overwrite existing output files");
}

RunConfig load_config(const CommonArgs& args) {
  if (args.config_path.empty())
    return run_config_from_json("", args.overrides);
  return load_run_config(args.config_path, args.overrides);
}

// Create the output directory and refuse to clobber prior results unless
// --force is given.
void prepare_out_dir(const CommonArgs& args,
                     const std::vector<std::string>& files) {
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  if (args.force) return;
  for (const std::string& f : files)
    if (fs::exists(dir / f))
      throw IoError("output file '" + (dir / f).string() +
                    "' exists; pass --force to overwrite");
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "na";
  return format_double(v);
}

void print_sim_warning(const SimConfig& sim) {
  if (const auto w = sim.warning())
    std::cerr << "warning: " << *w << "\n";
}

// response.csv: x, target, then one column per gene (gene n is the output).
std::string response_csv(const GeneCircuit& circuit, const TargetSpec& target,
                         const SimConfig& sim) {
  std::string out = "x,target";
  for (int j = 1; j <= circuit.n; ++j) out += ",y" + std::to_string(j);
  out += "\n";
  const auto grid = sample_grid(target);
  try {
    const Matrix curve = response_curve(circuit, grid, sim);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out += format_double(grid[k]);
      out += ",";
      out += format_double(eval_target(target, grid[k]));
      for (int j = 0; j < circuit.n; ++j) {
        out += ",";
        out += format_double(curve(static_cast<Eigen::Index>(k), j));
      }
      out += "\n";
    }
  } catch (const NonFiniteState&) {
    // Diverged circuit: leave only the header; the record carries the flag.
  }
  return out;
}

std::string loss_csv(const std::vector<double>& history) {
  std::string out = "iter,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out += std::to_string(i);
    out += ",";
    out += format_double(history[i]);
    out += "\n";
  }
  return out;
}

std::string histogram_csv(const WeightHistogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out += format_double(h.lo + b * h.bin_width);
    out += ",";
    out += format_double(h.lo + (b + 1) * h.bin_width);
    out += ",";
    out += std::to_string(h.counts[b]);
    out += "\n";
  }
  return out;
}

void print_record_summary(const TrialRecord& rec) {
  std::printf("size=%d seed=%" PRIu64 " trainer=%s success=%s mse=%s iters=%d\n",
              rec.size, rec.seed, trainer_name(rec.trainer),
              rec.success ? "yes" : "no", csv_num(rec.final_mse).c_str(),
              rec.iterations);
  if (rec.stability)
    std::printf("stability: max Re(eig)=%.6f -> %s\n",
                rec.stability->max_real_part,
                rec.stability->stable ? "stable" : "unstable");
  else
    std::printf("stability: no fixed point found\n");
  if (rec.team)
    std::printf("team: %s (mean hidden conformity %.3f)\n",
                team_class_name(rec.team->classification),
                rec.team->mean_unsupervised_conformity);
  std::printf("edges(|w|>=tau): connectivity=%d\n", rec.edge_conn);
}

int cmd_train(const CommonArgs& args, Trainer trainer) {
  const RunConfig rc = load_config(args);
  print_sim_warning(rc.configs.sim);
  prepare_out_dir(args, {"circuit.json", "result.jsonl", "loss.csv",
                         "response.csv", "run_config.json"});

  const std::uint64_t seed = trainer == Trainer::Evolutionary
                                 ? rc.configs.evo.rng_seed
                                 : rc.configs.gd.rng_seed;
  if (trainer != Trainer::Evolutionary && rc.configs.gd.mutation_rate > 0.0)
    trainer = Trainer::HybridMutatedGd;
  const Regularization reg = rc.configs.loss.l1_lambda > 0.0
                                 ? Regularization::L1
                                 : Regularization::None;

  const TrialRecord rec = run_trial(rc.n, 0, seed, trainer, reg, rc.configs);

  const fs::path dir(args.out_dir);
  CircuitMeta meta{rec.seed, trainer_name(rec.trainer),
                   rc.configs.target.name()};
  save_circuit((dir / "circuit.json").string(), rec.circuit, meta);
  {
    JsonlWriter w((dir / "result.jsonl").string());
    w.write_record(trial_record_to_json(rec));
  }
  write_text(dir / "loss.csv", loss_csv(rec.loss_history));
  write_text(dir / "response.csv",
             response_csv(rec.circuit, rc.configs.target, rc.configs.sim));
  write_text(dir / "run_config.json", run_config_to_json(rc));

  print_record_summary(rec);
  std::printf("wrote %s\n", (dir / "circuit.json").string().c_str());
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const RunConfig rc = load_config(args);
  print_sim_warning(rc.configs.sim);

  if (rc.study == "ablation") {
    prepare_out_dir(args, {"records.jsonl", "ablation.csv", "sweep_config.json"});
    const fs::path dir(args.out_dir);
    write_text(dir / "sweep_config.json", run_config_to_json(rc));
    JsonlWriter records((dir / "records.jsonl").string());
    const RecordSink sink = [&](const TrialRecord& rec) {
      records.write_record(trial_record_to_json(rec));
      std::printf("lambda=%s size=%d trial=%d success=%s mse=%s\n",
                  format_double(rec.l1_lambda).c_str(), rec.size, rec.trial,
                  rec.success ? "yes" : "no", csv_num(rec.final_mse).c_str());
    };
    const AblationResult res =
        l1_ablation(rc.ablation_lambdas, rc.ablation_size, rc.ablation_trials,
                    rc.sweep_trainer, rc.base_seed, rc.configs, args.workers,
                    sink);
    std::string csv =
        "lambda,trials,successes,success_ratio,mean_total_strength,"
        "median_total_strength,mean_signed_sum\n";
    for (const AblationCell& c : res.cells) {
      csv += format_double(c.lambda) + "," + std::to_string(c.trials) + "," +
             std::to_string(c.successes) + "," +
             format_double(c.success_ratio) + "," +
             csv_num(c.mean_total_strength) + "," +
             csv_num(c.median_total_strength) + "," +
             csv_num(c.mean_signed_sum) + "\n";
    }
    write_text(dir / "ablation.csv", csv);
    std::printf("ablation finished: %zu lambdas x %d trials\n",
                res.cells.size(), rc.ablation_trials);
    return 0;
  }

  if (rc.study != "learnability")
    throw ConfigError("config: unknown study '" + rc.study + "'");

  std::vector<std::string> outputs = {"records.jsonl", "learnability.csv",
                                      "signs_summary.csv",
                                      "stability_scatter.csv",
                                      "sweep_config.json", "summary.json"};
  const SweepConfig sc = make_sweep_config(rc);
  for (int size : sc.sizes)
    outputs.push_back("signs_size_" + std::to_string(size) + ".csv");
  prepare_out_dir(args, outputs);

  const fs::path dir(args.out_dir);
  write_text(dir / "sweep_config.json", run_config_to_json(rc));
  JsonlWriter records((dir / "records.jsonl").string());
  const RecordSink sink = [&](const TrialRecord& rec) {
    records.write_record(trial_record_to_json(rec));
    std::printf("size=%d trial=%d success=%s mse=%s iters=%d\n", rec.size,
                rec.trial, rec.success ? "yes" : "no",
                csv_num(rec.final_mse).c_str(), rec.iterations);
  };

  const SweepResult res = learnability_sweep(sc, args.workers, sink);

  std::string curve_csv = "size,trials,successes,ratio\n";
  for (const SizePoint& pt : res.curve.points)
    curve_csv += std::to_string(pt.size) + "," + std::to_string(pt.trials) +
                 "," + std::to_string(pt.successes) + "," +
                 format_double(pt.ratio) + "\n";
  write_text(dir / "learnability.csv", curve_csv);

  const SignStudy study =
      sign_shift_study(res.records, sc.configs.loss, sc.configs.analysis.bin_width);
  std::string signs_csv = "size,trials_used,mean_weight,negative_fraction\n";
  for (const SignStudyEntry& e : study.entries) {
    signs_csv += std::to_string(e.size) + "," + std::to_string(e.trials_used) +
                 "," + format_double(e.histogram.mean) + "," +
                 format_double(e.histogram.negative_fraction) + "\n";
    write_text(dir / ("signs_size_" + std::to_string(e.size) + ".csv"),
               histogram_csv(e.histogram));
  }
  write_text(dir / "signs_summary.csv", signs_csv);

  std::string scatter =
      "size,trial,success,diverged,final_mse,max_real_part,stable,"
      "edge_connectivity,team_class,mean_unsupervised_conformity\n";
  for (const TrialRecord& r : res.records) {
    scatter += std::to_string(r.size) + "," + std::to_string(r.trial) + "," +
               (r.success ? "1" : "0") + "," + (r.diverged ? "1" : "0") + "," +
               csv_num(r.final_mse) + ",";
    scatter += r.stability ? format_double(r.stability->max_real_part) : "na";
    scatter += ",";
    scatter += r.stability ? (r.stability->stable ? "1" : "0") : "na";
    scatter += "," + std::to_string(r.edge_conn) + ",";
    scatter += r.team ? team_class_name(r.team->classification) : "na";
    scatter += ",";
    scatter +=
        r.team ? format_double(r.team->mean_unsupervised_conformity) : "na";
    scatter += "\n";
  }
  write_text(dir / "stability_scatter.csv", scatter);

  // Machine-readable headline numbers.
  std::string summary = "{\n  \"threshold_size\": ";
  summary += res.curve.threshold_size
                 ? std::to_string(*res.curve.threshold_size)
                 : std::string("null");
  summary += ",\n  \"points\": [";
  for (std::size_t i = 0; i < res.curve.points.size(); ++i) {
    const SizePoint& pt = res.curve.points[i];
    summary += std::string(i ? ", " : "") + "{\"size\": " +
               std::to_string(pt.size) +
               ", \"successes\": " + std::to_string(pt.successes) +
               ", \"trials\": " + std::to_string(pt.trials) +
               ", \"ratio\": " + format_double(pt.ratio) + "}";
  }
  summary += "]\n}\n";
  write_text(dir / "summary.json", summary);

  for (const SizePoint& pt : res.curve.points)
    std::printf("size %2d: %d/%d learned (ratio %.3f)\n", pt.size,
                pt.successes, pt.trials, pt.ratio);
  if (res.curve.threshold_size)
    std::printf("learnability threshold at size %d\n", *res.curve.threshold_size);
  else
    std::printf("no learnability collapse within the scanned sizes\n");
  return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& circuit_path) {
  const RunConfig rc = load_config(args);
  prepare_out_dir(args, {"analysis.json", "eigenvalues.csv", "response.csv"});

  auto [circuit, meta] = load_circuit(circuit_path);
  TrialRecord rec = analyze_circuit(circuit, rc.configs);
  rec.seed = meta.seed;
  if (!meta.trainer.empty()) {
    try {
      rec.trainer = trainer_from_name(meta.trainer);
    } catch (const std::invalid_argument&) {
      // Foreign provenance string; keep the default label.
    }
  }

  const fs::path dir(args.out_dir);
  write_text(dir / "analysis.json", trial_record_to_json(rec) + "\n");

  std::string eig_csv = "re,im\n";
  if (rec.stability)
    for (const auto& z : rec.stability->eigenvalues)
      eig_csv += format_double(z.real()) + "," + format_double(z.imag()) + "\n";
  write_text(dir / "eigenvalues.csv", eig_csv);
  write_text(dir / "response.csv",
             response_csv(circuit, rc.configs.target, rc.configs.sim));

  print_record_summary(rec);
  return 0;
}

std::string dot_export(const GeneCircuit& circuit, double edge_tau) {
  const Vector strength = node_strength(circuit);
  const Vector feedback = feedback_sum(circuit);
  std::string dot = "digraph circuit {\n  rankdir=LR;\n"
                    "  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n";
  char buf[160];
  for (int i = 0; i < circuit.n; ++i) {
    const char* color = feedback[i] > 0.0   ? "palegreen"
                        : feedback[i] < 0.0 ? "lightskyblue"
                                            : "gray90";
    const double width = 0.35 + 0.15 * strength[i];
    std::snprintf(buf, sizeof buf,
                  "  g%d [width=%.3f, fixedsize=true, fillcolor=%s%s];\n",
                  i + 1, width, color,
                  i == circuit.n - 1 ? ", peripheries=2" : "");
    dot += buf;
  }
  for (int i = 0; i < circuit.n; ++i)
    for (int j = 0; j < circuit.n; ++j) {
      const double w = circuit.weights(i, j);
      if (std::abs(w) < edge_tau) continue;
      // Edge from regulator j to regulated gene i.
      std::snprintf(buf, sizeof buf,
                    "  g%d -> g%d [label=\"%.3f\", color=%s, arrowhead=%s];\n",
                    j + 1, i + 1, w, w > 0.0 ? "forestgreen" : "crimson",
                    w > 0.0 ? "normal" : "tee");
      dot += buf;
    }
  dot += "}\n";
  return dot;
}

int cmd_export(const CommonArgs& args, const std::string& circuit_path,
               const std::string& format, double edge_tau) {
  if (format != "dot" && format != "csv")
    throw ConfigError("export: format must be 'dot' or 'csv'");
  auto [circuit, meta] = load_circuit(circuit_path);
  (void)meta;
  if (!(edge_tau >= 0.0)) throw ConfigError("export: edge-tau must be >= 0");

  prepare_out_dir(args, {format == "dot" ? "circuit.dot" : "circuit_edges.csv"});
  const fs::path dir(args.out_dir);
  if (format == "dot") {
    write_text(dir / "circuit.dot", dot_export(circuit, edge_tau));
    std::printf("wrote %s\n", (dir / "circuit.dot").string().c_str());
  } else {
    std::string csv = "from,to,weight\n";
    for (int i = 0; i < circuit.n; ++i)
      for (int j = 0; j < circuit.n; ++j)
        if (std::abs(circuit.weights(i, j)) >= edge_tau)
          csv += "g" + std::to_string(j + 1) + ",g" + std::to_string(i + 1) +
                 "," + format_double(circuit.weights(i, j)) + "\n";
    write_text(dir / "circuit_edges.csv", csv);
    std::printf("wrote %s\n", (dir / "circuit_edges.csv").string().c_str());
  }
  return 0;
}

int cmd_verify() {
  const auto results = verify_suite();
  bool all_pass = true;
  std::printf("%-32s %-6s %10s  %s\n", "check", "result", "ms", "detail");
  for (const CheckResult& r : results) {
    std::printf("%-32s %-6s %10.1f  %s\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.ms, r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  std::printf("%s\n", all_pass ? "all checks passed" : "CHECKS FAILED");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gene-circuit learnability toolkit"};
  app.require_subcommand(1);

  CommonArgs train_args, evolve_args, sweep_args, analyze_args, export_args;
  std::string analyze_circuit_path, export_circuit_path;
  std::string export_format = "dot";
  double export_edge_tau = 0.1;

  auto* train = app.add_subcommand("train", "gradient-descent training run");
  add_config_options(train, train_args, false);

  auto* evolve = app.add_subcommand("evolve", "evolutionary training run");
  add_config_options(evolve, evolve_args, false);

  auto* sweep = app.add_subcommand(
      "sweep", "size sweep or L1 ablation over many trials");
  add_config_options(sweep, sweep_args, false);
  sweep->add_option("-j,--workers", sweep_args.workers,
                    "worker threads (records are identical regardless)")
      ->envname("GCL_WORKERS")
      ->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "analysis battery on a saved circuit");
  analyze->add_option("--circuit", analyze_circuit_path, "circuit.json file")
      ->required();
  add_config_options(analyze, analyze_args, false);

  auto* exp = app.add_subcommand("export", "graph export of a saved circuit");
  exp->add_option("--circuit", export_circuit_path, "circuit.json file")
      ->required();
  exp->add_option("--format", export_format, "dot or csv");
  exp->add_option("--edge-tau", export_edge_tau,
                  "minimum |weight| for an exported edge");
  exp->add_option("-o,--out", export_args.out_dir, "output directory")->required();
  exp->add_flag("--force", export_args.force, "overwrite existing output files");

  auto* verify = app.add_subcommand(
      "verify", "run the self-check oracles (gradients, spectra, cuts)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Bad usage is a configuration error; keep --help at 0 but fold
    // CLI11's assorted parse-failure codes into the documented 2.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args, Trainer::GradientDescent);
    if (evolve->parsed()) return cmd_train(evolve_args, Trainer::Evolutionary);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args, analyze_circuit_path);
    if (exp->parsed())
      return cmd_export(export_args, export_circuit_path, export_format,
                        export_edge_tau);
    if (verify->parsed()) return cmd_verify();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
