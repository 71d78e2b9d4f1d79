#include "gcl/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "gcl/rng.hpp"

namespace gcl {

Matrix jacobian(const GeneCircuit& circuit, const Vector& state,
                InputMode mode) {
  if (state.size() != circuit.n)
    throw std::invalid_argument("jacobian: state size != circuit.n");
  const int n = circuit.n;
  const Vector u = circuit.weights * state;
  Matrix J(n, n);
  for (int i = 0; i < n; ++i) {
    const double phi_p = sigmoid_prime(u[i]);
    for (int j = 0; j < n; ++j)
      J(i, j) = phi_p * circuit.weights(i, j) - (i == j ? 1.0 : 0.0);
  }
  if (mode == InputMode::ClampFirstNode) {
    J.row(0).setZero();
    J(0, 0) = -1.0;
  }
  return J;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("eigenvalues: matrix must be square");
  if (!m.allFinite())
    throw std::invalid_argument("eigenvalues: matrix has NaN/inf entries");
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("eigenvalues: Schur iteration did not converge");
  std::vector<std::complex<double>> ev(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) ev[i] = solver.eigenvalues()[i];
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return ev;
}

StabilityReport stability_report(const GeneCircuit& circuit,
                                 double reference_input,
                                 const SimConfig& cfg) {
  const SettleResult s = steady_state(circuit, reference_input, cfg);
  if (!s.converged)
    throw NotConverged("stability_report: no fixed point within step budget");
  StabilityReport rep;
  rep.fixed_point = s.state;
  rep.jacobian = jacobian(circuit, s.state, cfg.input_mode);
  rep.eigenvalues = eigenvalues(rep.jacobian);
  rep.max_real_part = rep.eigenvalues.front().real();
  rep.stable = rep.max_real_part < 0.0;
  return rep;
}

bool perturb_and_return(const GeneCircuit& circuit, const Vector& fixed_point,
                        double input_value, const SimConfig& cfg,
                        std::uint64_t seed, double perturbation,
                        double return_tol) {
  Rng rng(seed);
  Vector start = fixed_point;
  for (Eigen::Index i = 0; i < start.size(); ++i)
    start[i] += perturbation * (2.0 * rng.uniform() - 1.0);
  try {
    const SettleResult s = settle_from(circuit, std::move(start), input_value, cfg);
    return (s.state - fixed_point).lpNorm<Eigen::Infinity>() < return_tol;
  } catch (const NonFiniteState&) {
    return false;
  }
}

WeightHistogram histogram_from_values(const std::vector<double>& values,
                                      double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("histogram: bin_width must be > 0");
  WeightHistogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;

  double max_abs = 0.0;
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("histogram: non-finite value");
    max_abs = std::max(max_abs, std::abs(v));
  }
  // Symmetric range so a sign-flipped sample mirrors exactly.
  const int half = std::max(1, static_cast<int>(std::ceil(max_abs / bin_width)));
  h.lo = -half * bin_width;
  h.counts.assign(2 * static_cast<std::size_t>(half), 0);

  double sum = 0.0;
  std::int64_t neg = 0, pos = 0;
  for (double v : values) {
    auto bin = static_cast<std::int64_t>(std::floor((v - h.lo) / bin_width));
    bin = std::clamp<std::int64_t>(bin, 0,
                                   static_cast<std::int64_t>(h.counts.size()) - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
    sum += v;
    if (v < 0.0) ++neg;
    else if (v > 0.0) ++pos;
  }
  h.mean = sum / static_cast<double>(values.size());
  h.negative_fraction =
      (neg + pos) > 0 ? static_cast<double>(neg) / (neg + pos) : 0.0;
  return h;
}

WeightHistogram weight_sign_histogram(const GeneCircuit& circuit,
                                      double bin_width) {
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(circuit.n) * circuit.n);
  for (int i = 0; i < circuit.n; ++i)
    for (int j = 0; j < circuit.n; ++j) vals.push_back(circuit.weights(i, j));
  return histogram_from_values(vals, bin_width);
}

Vector node_strength(const GeneCircuit& circuit) {
  return circuit.weights.cwiseAbs().rowwise().sum();
}

Vector feedback_sum(const GeneCircuit& circuit) {
  return circuit.weights.rowwise().sum();
}

void UndirectedGraph::add_edge(int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw std::invalid_argument("add_edge: vertex out of range");
  if (i == j) return;  // self-loops carry no connectivity information
  adj[i][j] = adj[j][i] = 1;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adj[i][j]) e.emplace_back(i, j);
  return e;
}

UndirectedGraph binarize(const GeneCircuit& circuit, double edge_tau) {
  if (!(edge_tau >= 0.0))
    throw std::invalid_argument("binarize: edge_tau must be >= 0");
  UndirectedGraph g(circuit.n);
  for (int i = 0; i < circuit.n; ++i)
    for (int j = i + 1; j < circuit.n; ++j) {
      const double w = std::max(std::abs(circuit.weights(i, j)),
                                std::abs(circuit.weights(j, i)));
      if (w >= edge_tau) g.add_edge(i, j);
    }
  return g;
}

namespace {

bool graph_connected(const UndirectedGraph& g) {
  if (g.n <= 1) return true;
  std::vector<char> seen(g.n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w = 0; w < g.n; ++w)
      if (g.adj[v][w] && !seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
  }
  return reached == g.n;
}

// Unit-capacity max flow (Edmonds-Karp). Each undirected edge becomes a
// forward/backward arc pair that also serve as each other's residuals.
struct FlowNet {
  struct Arc {
    int to;
    int cap;
  };
  std::vector<Arc> arcs;                 // arc 2k+1 is the reverse of arc 2k
  std::vector<std::vector<int>> out;     // per-vertex arc indices

  explicit FlowNet(const UndirectedGraph& g) : out(g.n) {
    for (const auto& [i, j] : g.edges()) {
      out[i].push_back(static_cast<int>(arcs.size()));
      arcs.push_back({j, 1});
      out[j].push_back(static_cast<int>(arcs.size()));
      arcs.push_back({i, 1});
    }
  }

  int max_flow(int s, int t) {
    // Restore capacities (the net is reused across sinks).
    for (auto& a : arcs) a.cap = 1;
    int flow = 0;
    while (true) {
      std::vector<int> via(out.size(), -1);  // arc taken to reach vertex
      std::vector<char> seen(out.size(), 0);
      std::queue<int> q;
      q.push(s);
      seen[s] = 1;
      while (!q.empty() && !seen[t]) {
        const int v = q.front();
        q.pop();
        for (int id : out[v]) {
          const Arc& a = arcs[id];
          if (a.cap > 0 && !seen[a.to]) {
            seen[a.to] = 1;
            via[a.to] = id;
            q.push(a.to);
          }
        }
      }
      if (!seen[t]) return flow;
      for (int v = t; v != s; v = arcs[via[v] ^ 1].to) {
        --arcs[via[v]].cap;
        ++arcs[via[v] ^ 1].cap;
      }
      ++flow;
    }
  }
};

}  // namespace

int edge_connectivity(const UndirectedGraph& g) {
  if (g.n < 2) return 0;
  if (!graph_connected(g)) return 0;
  // Any global min cut separates vertex 0 from at least one other vertex,
  // so fixing s = 0 and scanning sinks is exhaustive.
  FlowNet net(g);
  int best = std::numeric_limits<int>::max();
  for (int t = 1; t < g.n; ++t) best = std::min(best, net.max_flow(0, t));
  return best;
}

const char* team_class_name(TeamClass c) {
  switch (c) {
    case TeamClass::Homogeneous: return "homogeneous";
    case TeamClass::Heterogeneous: return "heterogeneous";
    case TeamClass::Mixed: return "mixed";
  }
  return "?";
}

namespace {

// Pearson correlation; 0 when either side is (numerically) constant.
double pearson(const Vector& a, const Vector& b) {
  const double ma = a.mean(), mb = b.mean();
  const Vector da = a.array() - ma, db = b.array() - mb;
  const double va = da.squaredNorm(), vb = db.squaredNorm();
  if (va <= 1e-24 || vb <= 1e-24) return 0.0;
  return std::clamp(da.dot(db) / std::sqrt(va * vb), -1.0, 1.0);
}

}  // namespace

TeamReport team_metrics(const Matrix& curves, const TargetSpec& spec) {
  const Vector targets = target_vector(spec);
  if (curves.rows() != targets.size())
    throw std::invalid_argument(
        "team_metrics: curve rows must match the target grid");
  if (!curves.allFinite())
    throw std::invalid_argument("team_metrics: curves must be finite");
  const int n = static_cast<int>(curves.cols());

  TeamReport rep;
  rep.per_node.resize(n);
  double acc = 0.0;
  int hidden = 0;
  for (int j = 0; j < n; ++j) {
    NodeTeamStats& st = rep.per_node[j];
    st.node = j;
    st.supervised = (j == n - 1);
    st.conformity = pearson(curves.col(j), targets);
    double amp = 0.0;
    for (Eigen::Index k = 0; k < targets.size(); ++k)
      if (targets[k] == 1.0) amp = std::max(amp, curves(k, j));
    st.passband_amplitude = amp;
    if (!st.supervised) {
      acc += st.conformity;
      ++hidden;
    }
  }
  rep.mean_unsupervised_conformity = hidden > 0 ? acc / hidden : 0.0;
  rep.classification = rep.mean_unsupervised_conformity > 0.3
                           ? TeamClass::Homogeneous
                           : (rep.mean_unsupervised_conformity < -0.3
                                  ? TeamClass::Heterogeneous
                                  : TeamClass::Mixed);
  return rep;
}

}  // namespace gcl
