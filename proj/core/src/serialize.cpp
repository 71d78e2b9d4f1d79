#include "gcl/serialize.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace gcl {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reject keys we do not understand instead of silently ignoring them;
// config typos should fail loudly.
void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("config: unknown key '" + where +
                        (where.empty() ? "" : ".") + key + "'");
  }
}

double require_finite(const json& j, const std::string& where) {
  if (!j.is_number())
    throw ConfigError("config: '" + where + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw ConfigError("config: '" + where + "' must be finite");
  return v;
}

json weights_to_json(const Matrix& w) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < w.cols(); ++j) row.push_back(w(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix weights_from_json(const json& rows, int n, const std::string& where) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ConfigError(where + ": expected " + std::to_string(n) + " rows");
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ConfigError(where + ": row " + std::to_string(i) + " must have " +
                        std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) {
      const json& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number())
        throw ConfigError(where + ": non-numeric weight at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      w(i, j) = cell.get<double>();
    }
  }
  return w;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigError(where + ": expected an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json histogram_to_json(const WeightHistogram& h) {
  return json{{"bin_width", h.bin_width},
              {"lo", h.lo},
              {"counts", h.counts},
              {"mean", h.mean},
              {"negative_fraction", h.negative_fraction}};
}

WeightHistogram histogram_from_json(const json& j) {
  WeightHistogram h;
  h.bin_width = j.at("bin_width").get<double>();
  h.lo = j.at("lo").get<double>();
  h.counts = j.at("counts").get<std::vector<std::int64_t>>();
  h.mean = j.at("mean").get<double>();
  h.negative_fraction = j.at("negative_fraction").get<double>();
  return h;
}

json stability_to_json(const StabilityReport& r) {
  json ev = json::array();
  for (const auto& z : r.eigenvalues)
    ev.push_back(json::array({z.real(), z.imag()}));
  return json{{"fixed_point", vector_to_json(r.fixed_point)},
              {"jacobian", weights_to_json(r.jacobian)},
              {"eigenvalues", std::move(ev)},
              {"max_real_part", r.max_real_part},
              {"stable", r.stable}};
}

StabilityReport stability_from_json(const json& j) {
  StabilityReport r;
  r.fixed_point = vector_from_json(j.at("fixed_point"), "stability.fixed_point");
  const int n = static_cast<int>(r.fixed_point.size());
  r.jacobian = weights_from_json(j.at("jacobian"), n, "stability.jacobian");
  for (const auto& pair : j.at("eigenvalues"))
    r.eigenvalues.emplace_back(pair.at(0).get<double>(),
                               pair.at(1).get<double>());
  r.max_real_part = j.at("max_real_part").get<double>();
  r.stable = j.at("stable").get<bool>();
  return r;
}

json team_to_json(const TeamReport& t) {
  json nodes = json::array();
  for (const auto& st : t.per_node)
    nodes.push_back(json{{"node", st.node},
                         {"conformity", st.conformity},
                         {"passband_amplitude", st.passband_amplitude},
                         {"supervised", st.supervised}});
  return json{
      {"per_node", std::move(nodes)},
      {"mean_unsupervised_conformity", t.mean_unsupervised_conformity},
      {"classification", team_class_name(t.classification)}};
}

TeamReport team_from_json(const json& j) {
  TeamReport t;
  for (const auto& nj : j.at("per_node")) {
    NodeTeamStats st;
    st.node = nj.at("node").get<int>();
    st.conformity = nj.at("conformity").get<double>();
    st.passband_amplitude = nj.at("passband_amplitude").get<double>();
    st.supervised = nj.at("supervised").get<bool>();
    t.per_node.push_back(st);
  }
  t.mean_unsupervised_conformity =
      j.at("mean_unsupervised_conformity").get<double>();
  const std::string c = j.at("classification").get<std::string>();
  t.classification = c == "homogeneous" ? TeamClass::Homogeneous
                     : c == "heterogeneous" ? TeamClass::Heterogeneous
                                            : TeamClass::Mixed;
  return t;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string circuit_to_json(const GeneCircuit& circuit,
                            const CircuitMeta& meta) {
  circuit.validate();
  const json doc{{"n", circuit.n},
                 {"weights", weights_to_json(circuit.weights)},
                 {"meta",
                  {{"seed", meta.seed},
                   {"trainer", meta.trainer},
                   {"target", meta.target}}}};
  return doc.dump(2) + "\n";
}

std::pair<GeneCircuit, CircuitMeta> circuit_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("circuit: not valid JSON: ") + e.what());
  }
  expect_keys(doc, "", {"n", "weights", "meta"});
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    throw ConfigError("circuit: missing integer field 'n'");
  const int n = doc["n"].get<int>();
  if (n < 1) throw ConfigError("circuit: n must be >= 1");
  if (!doc.contains("weights"))
    throw ConfigError("circuit: missing field 'weights'");
  GeneCircuit c(n, weights_from_json(doc["weights"], n, "circuit.weights"));
  CircuitMeta meta;
  if (doc.contains("meta")) {
    const json& mj = doc["meta"];
    expect_keys(mj, "meta", {"seed", "trainer", "target"});
    meta.seed = mj.value("seed", std::uint64_t{0});
    meta.trainer = mj.value("trainer", std::string{});
    meta.target = mj.value("target", std::string{});
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  return {std::move(c), std::move(meta)};
}

void save_circuit(const std::string& path, const GeneCircuit& circuit,
                  const CircuitMeta& meta) {
  const std::string text = circuit_to_json(circuit, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("short write to '" + path + "'");
}

std::pair<GeneCircuit, CircuitMeta> load_circuit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read circuit file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return circuit_from_json(buf.str());
}

std::string trial_record_to_json(const TrialRecord& rec) {
  json doc{{"size", rec.size},
           {"trial", rec.trial},
           {"seed", rec.seed},
           {"trainer", trainer_name(rec.trainer)},
           {"regularization", regularization_name(rec.regularization)},
           {"l1_lambda", rec.l1_lambda},
           {"success", rec.success},
           {"diverged", rec.diverged},
           {"iterations", rec.iterations},
           {"loss_history", rec.loss_history},
           {"circuit",
            {{"n", rec.circuit.n}, {"weights", weights_to_json(rec.circuit.weights)}}},
           {"strength", vector_to_json(rec.strength)},
           {"feedback", vector_to_json(rec.feedback)},
           {"histogram", histogram_to_json(rec.histogram)},
           {"edge_connectivity", rec.edge_conn}};
  doc["final_mse"] = std::isnan(rec.final_mse) ? json() : json(rec.final_mse);
  doc["stability"] = rec.stability ? stability_to_json(*rec.stability) : json();
  doc["team"] = rec.team ? team_to_json(*rec.team) : json();
  return doc.dump();
}

TrialRecord trial_record_from_json(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("record: not valid JSON: ") + e.what());
  }
  try {
    TrialRecord rec;
    rec.size = doc.at("size").get<int>();
    rec.trial = doc.at("trial").get<int>();
    rec.seed = doc.at("seed").get<std::uint64_t>();
    rec.trainer = trainer_from_name(doc.at("trainer").get<std::string>());
    rec.regularization =
        regularization_from_name(doc.at("regularization").get<std::string>());
    rec.l1_lambda = doc.at("l1_lambda").get<double>();
    rec.success = doc.at("success").get<bool>();
    rec.diverged = doc.at("diverged").get<bool>();
    rec.final_mse =
        doc.at("final_mse").is_null() ? kNaN : doc.at("final_mse").get<double>();
    rec.iterations = doc.at("iterations").get<int>();
    rec.loss_history = doc.at("loss_history").get<std::vector<double>>();
    const json& cj = doc.at("circuit");
    const int n = cj.at("n").get<int>();
    rec.circuit =
        GeneCircuit(n, weights_from_json(cj.at("weights"), n, "record.circuit"));
    rec.strength = vector_from_json(doc.at("strength"), "record.strength");
    rec.feedback = vector_from_json(doc.at("feedback"), "record.feedback");
    rec.histogram = histogram_from_json(doc.at("histogram"));
    rec.edge_conn = doc.at("edge_connectivity").get<int>();
    if (!doc.at("stability").is_null())
      rec.stability = stability_from_json(doc.at("stability"));
    if (!doc.at("team").is_null()) rec.team = team_from_json(doc.at("team"));
    return rec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("record: bad field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("record: ") + e.what());
  }
}

JsonlWriter::JsonlWriter(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd_ < 0)
    throw IoError("cannot open '" + path + "': " + std::strerror(errno));
}

JsonlWriter::~JsonlWriter() {
  if (fd_ >= 0) ::close(fd_);
}

void JsonlWriter::write_record(const std::string& json_line) {
  // One write() per line. A SIGKILL between lines loses only whole lines;
  // the kernel never tears a single write to a regular file.
  std::string line;
  line.reserve(json_line.size() + 1);
  line = json_line;
  line.push_back('\n');
  const ssize_t written = ::write(fd_, line.data(), line.size());
  if (written != static_cast<ssize_t>(line.size()))
    throw IoError("short write to '" + path_ + "': " + std::strerror(errno));
}

void RunConfig::validate() const {
  try {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    configs.validate();
    SweepConfig sc = make_sweep_config(*this);
    sc.validate();
    if (study != "learnability" && study != "ablation")
      throw std::invalid_argument("study must be 'learnability' or 'ablation'");
    if (ablation_lambdas.empty())
      throw std::invalid_argument("ablation_lambdas must be nonempty");
    for (double l : ablation_lambdas)
      if (!(l >= 0.0 && l <= 1.0))
        throw std::invalid_argument("ablation lambdas must be in [0,1]");
    if (ablation_size < 2)
      throw std::invalid_argument("ablation_size must be >= 2");
    if (ablation_trials < 1)
      throw std::invalid_argument("ablation_trials must be >= 1");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

SweepConfig make_sweep_config(const RunConfig& rc) {
  SweepConfig sc;
  sc.sizes = rc.sweep_sizes;
  sc.trials_per_size = rc.trials_per_size;
  sc.trainer = rc.sweep_trainer;
  sc.base_seed = rc.base_seed;
  sc.regularization = rc.regularization;
  sc.configs = rc.configs;
  return sc;
}

namespace {

void parse_target(const json& j, TargetSpec& t) {
  expect_keys(j, "target",
              {"kind", "lo", "hi", "threshold", "grid_min", "grid_max",
               "grid_points"});
  if (j.contains("kind")) {
    const std::string k = j["kind"].get<std::string>();
    if (k == "french_flag") t.kind = TargetKind::FrenchFlag;
    else if (k == "switch") t.kind = TargetKind::Switch;
    else throw ConfigError("config: unknown target kind '" + k + "'");
  }
  if (j.contains("lo")) t.lo = require_finite(j["lo"], "target.lo");
  if (j.contains("hi")) t.hi = require_finite(j["hi"], "target.hi");
  if (j.contains("threshold"))
    t.threshold = require_finite(j["threshold"], "target.threshold");
  if (j.contains("grid_min"))
    t.grid_min = require_finite(j["grid_min"], "target.grid_min");
  if (j.contains("grid_max"))
    t.grid_max = require_finite(j["grid_max"], "target.grid_max");
  if (j.contains("grid_points")) t.grid_points = j["grid_points"].get<int>();
}

void parse_sim(const json& j, SimConfig& s) {
  expect_keys(j, "sim",
              {"dt", "max_steps", "convergence_tol", "input_mode",
               "initial_state"});
  if (j.contains("dt")) s.dt = require_finite(j["dt"], "sim.dt");
  if (j.contains("max_steps")) s.max_steps = j["max_steps"].get<int>();
  if (j.contains("convergence_tol"))
    s.convergence_tol = require_finite(j["convergence_tol"], "sim.convergence_tol");
  if (j.contains("input_mode")) {
    const std::string m = j["input_mode"].get<std::string>();
    if (m == "drive") s.input_mode = InputMode::DriveFirstNode;
    else if (m == "clamp") s.input_mode = InputMode::ClampFirstNode;
    else throw ConfigError("config: unknown input_mode '" + m + "'");
  }
  if (j.contains("initial_state"))
    s.initial_state = require_finite(j["initial_state"], "sim.initial_state");
}

void parse_loss(const json& j, LossConfig& l) {
  expect_keys(j, "loss", {"l1_lambda", "success_mse"});
  if (j.contains("l1_lambda"))
    l.l1_lambda = require_finite(j["l1_lambda"], "loss.l1_lambda");
  if (j.contains("success_mse"))
    l.success_mse = require_finite(j["success_mse"], "loss.success_mse");
}

void parse_gd(const json& j, GdConfig& g) {
  expect_keys(j, "gd",
              {"learning_rate", "beta1", "beta2", "eps", "max_iters",
               "unroll_steps", "init_std", "seed", "mutation_rate",
               "mutation_std"});
  if (j.contains("learning_rate"))
    g.learning_rate = require_finite(j["learning_rate"], "gd.learning_rate");
  if (j.contains("beta1")) g.adam_beta1 = require_finite(j["beta1"], "gd.beta1");
  if (j.contains("beta2")) g.adam_beta2 = require_finite(j["beta2"], "gd.beta2");
  if (j.contains("eps")) g.adam_eps = require_finite(j["eps"], "gd.eps");
  if (j.contains("max_iters")) g.max_iters = j["max_iters"].get<int>();
  if (j.contains("unroll_steps")) g.unroll_steps = j["unroll_steps"].get<int>();
  if (j.contains("init_std"))
    g.init_std = require_finite(j["init_std"], "gd.init_std");
  if (j.contains("seed")) g.rng_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("mutation_rate"))
    g.mutation_rate = require_finite(j["mutation_rate"], "gd.mutation_rate");
  if (j.contains("mutation_std"))
    g.mutation_std = require_finite(j["mutation_std"], "gd.mutation_std");
}

void parse_evo(const json& j, EvoConfig& e) {
  expect_keys(j, "evo",
              {"population_size", "crossover_rate", "mutation_rate",
               "mutation_std", "elite_fraction", "max_generations", "init_std",
               "seed"});
  if (j.contains("population_size"))
    e.population_size = j["population_size"].get<int>();
  if (j.contains("crossover_rate"))
    e.crossover_rate = require_finite(j["crossover_rate"], "evo.crossover_rate");
  if (j.contains("mutation_rate")) {
    if (j["mutation_rate"].is_null()) e.mutation_rate.reset();
    else e.mutation_rate = require_finite(j["mutation_rate"], "evo.mutation_rate");
  }
  if (j.contains("mutation_std"))
    e.mutation_std = require_finite(j["mutation_std"], "evo.mutation_std");
  if (j.contains("elite_fraction"))
    e.elite_fraction = require_finite(j["elite_fraction"], "evo.elite_fraction");
  if (j.contains("max_generations"))
    e.max_generations = j["max_generations"].get<int>();
  if (j.contains("init_std"))
    e.init_std = require_finite(j["init_std"], "evo.init_std");
  if (j.contains("seed")) e.rng_seed = j["seed"].get<std::uint64_t>();
}

void parse_analysis(const json& j, AnalysisParams& a) {
  expect_keys(j, "analysis",
              {"reference_input", "edge_tau", "bin_width", "prune_tau"});
  if (j.contains("reference_input"))
    a.reference_input = require_finite(j["reference_input"], "analysis.reference_input");
  if (j.contains("edge_tau"))
    a.edge_tau = require_finite(j["edge_tau"], "analysis.edge_tau");
  if (j.contains("bin_width"))
    a.bin_width = require_finite(j["bin_width"], "analysis.bin_width");
  if (j.contains("prune_tau"))
    a.prune_tau = require_finite(j["prune_tau"], "analysis.prune_tau");
}

void parse_sweep(const json& j, RunConfig& rc) {
  expect_keys(j, "sweep",
              {"sizes", "trials_per_size", "trainer", "base_seed",
               "regularization", "study", "ablation_lambdas", "ablation_size",
               "ablation_trials"});
  if (j.contains("sizes")) rc.sweep_sizes = j["sizes"].get<std::vector<int>>();
  if (j.contains("trials_per_size"))
    rc.trials_per_size = j["trials_per_size"].get<int>();
  if (j.contains("trainer")) {
    try {
      rc.sweep_trainer = trainer_from_name(j["trainer"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (j.contains("base_seed")) rc.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("regularization")) {
    try {
      rc.regularization =
          regularization_from_name(j["regularization"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (j.contains("study")) rc.study = j["study"].get<std::string>();
  if (j.contains("ablation_lambdas"))
    rc.ablation_lambdas = j["ablation_lambdas"].get<std::vector<double>>();
  if (j.contains("ablation_size"))
    rc.ablation_size = j["ablation_size"].get<int>();
  if (j.contains("ablation_trials"))
    rc.ablation_trials = j["ablation_trials"].get<int>();
}

RunConfig config_from_doc(json doc) {
  expect_keys(doc, "",
              {"n", "target", "sim", "loss", "gd", "evo", "analysis", "sweep"});
  RunConfig rc;
  try {
    if (doc.contains("n")) rc.n = doc["n"].get<int>();
    if (doc.contains("target")) parse_target(doc["target"], rc.configs.target);
    if (doc.contains("sim")) parse_sim(doc["sim"], rc.configs.sim);
    if (doc.contains("loss")) parse_loss(doc["loss"], rc.configs.loss);
    if (doc.contains("gd")) parse_gd(doc["gd"], rc.configs.gd);
    if (doc.contains("evo")) parse_evo(doc["evo"], rc.configs.evo);
    if (doc.contains("analysis"))
      parse_analysis(doc["analysis"], rc.configs.analysis);
    if (doc.contains("sweep")) parse_sweep(doc["sweep"], rc);
  } catch (const json::exception& e) {
    // e.what() leads with a "[json.exception...]" tag; drop it from the
    // user-facing message.
    std::string what = e.what();
    if (const auto tag = what.find("] ");
        !what.empty() && what.front() == '[' && tag != std::string::npos)
      what = what.substr(tag + 2);
    throw ConfigError("config: bad field type: " + what);
  }
  rc.validate();
  return rc;
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + spec + "' is not of the form key=value");
  const std::string path = spec.substr(0, eq);
  const std::string value_text = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::exception&) {
    value = value_text;  // bare word: treat as a string
  }
  json* cursor = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty())
      throw ConfigError("override '" + spec + "' has an empty path segment");
    if (dot == std::string::npos) {
      (*cursor)[part] = std::move(value);
      return;
    }
    cursor = &(*cursor)[part];
    start = dot + 1;
  }
}

}  // namespace

RunConfig run_config_from_json(const std::string& text,
                               const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const std::string& o : overrides) apply_override(doc, o);
  return config_from_doc(std::move(doc));
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return run_config_from_json(buf.str(), overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (in '" + path + "')");
  }
}

std::string run_config_to_json(const RunConfig& rc) {
  const TrialConfigs& c = rc.configs;
  json evo_mut = c.evo.mutation_rate ? json(*c.evo.mutation_rate) : json();
  const json doc{
      {"n", rc.n},
      {"target",
       {{"kind",
         c.target.kind == TargetKind::FrenchFlag ? "french_flag" : "switch"},
        {"lo", c.target.lo},
        {"hi", c.target.hi},
        {"threshold", c.target.threshold},
        {"grid_min", c.target.grid_min},
        {"grid_max", c.target.grid_max},
        {"grid_points", c.target.grid_points}}},
      {"sim",
       {{"dt", c.sim.dt},
        {"max_steps", c.sim.max_steps},
        {"convergence_tol", c.sim.convergence_tol},
        {"input_mode",
         c.sim.input_mode == InputMode::DriveFirstNode ? "drive" : "clamp"},
        {"initial_state", c.sim.initial_state}}},
      {"loss",
       {{"l1_lambda", c.loss.l1_lambda}, {"success_mse", c.loss.success_mse}}},
      {"gd",
       {{"learning_rate", c.gd.learning_rate},
        {"beta1", c.gd.adam_beta1},
        {"beta2", c.gd.adam_beta2},
        {"eps", c.gd.adam_eps},
        {"max_iters", c.gd.max_iters},
        {"unroll_steps", c.gd.unroll_steps},
        {"init_std", c.gd.init_std},
        {"seed", c.gd.rng_seed},
        {"mutation_rate", c.gd.mutation_rate},
        {"mutation_std", c.gd.mutation_std}}},
      {"evo",
       {{"population_size", c.evo.population_size},
        {"crossover_rate", c.evo.crossover_rate},
        {"mutation_rate", std::move(evo_mut)},
        {"mutation_std", c.evo.mutation_std},
        {"elite_fraction", c.evo.elite_fraction},
        {"max_generations", c.evo.max_generations},
        {"init_std", c.evo.init_std},
        {"seed", c.evo.rng_seed}}},
      {"analysis",
       {{"reference_input", c.analysis.reference_input},
        {"edge_tau", c.analysis.edge_tau},
        {"bin_width", c.analysis.bin_width},
        {"prune_tau", c.analysis.prune_tau}}},
      {"sweep",
       {{"sizes", rc.sweep_sizes},
        {"trials_per_size", rc.trials_per_size},
        {"trainer", trainer_name(rc.sweep_trainer)},
        {"base_seed", rc.base_seed},
        {"regularization", regularization_name(rc.regularization)},
        {"study", rc.study},
        {"ablation_lambdas", rc.ablation_lambdas},
        {"ablation_size", rc.ablation_size},
        {"ablation_trials", rc.ablation_trials}}}};
  return doc.dump(2) + "\n";
}

}  // namespace gcl
