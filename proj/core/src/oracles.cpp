#include "gcl/oracles.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gcl/rng.hpp"

namespace gcl {

namespace {

using cd = std::complex<double>;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

double unrolled_loss(const GeneCircuit& circuit, const TargetSpec& target,
                     const SimConfig& sim, const LossConfig& loss) {
  const auto grid = sample_grid(target);
  double sq = 0.0;
  for (double x : grid) {
    Vector y = Vector::Constant(circuit.n, sim.initial_state);
    for (int t = 0; t < sim.max_steps; ++t)
      y = euler_step(circuit, y, x, sim);
    const double err = y[circuit.n - 1] - eval_target(target, x);
    sq += err * err;
  }
  return sq / static_cast<double>(grid.size()) +
         loss.l1_lambda * circuit.l1_norm();
}

Matrix finite_difference_gradient(const GeneCircuit& circuit,
                                  const TargetSpec& target,
                                  const SimConfig& sim, const LossConfig& loss,
                                  double h) {
  Matrix g(circuit.n, circuit.n);
  GeneCircuit probe = circuit;
  for (int i = 0; i < circuit.n; ++i)
    for (int j = 0; j < circuit.n; ++j) {
      const double w0 = circuit.weights(i, j);
      probe.weights(i, j) = w0 + h;
      const double above = unrolled_loss(probe, target, sim, loss);
      probe.weights(i, j) = w0 - h;
      const double below = unrolled_loss(probe, target, sim, loss);
      probe.weights(i, j) = w0;
      g(i, j) = (above - below) / (2.0 * h);
    }
  return g;
}

namespace {

// --- closed-form polynomial machinery (no linear algebra) ----------------

double det3(const Matrix& m, int a, int b, int c) {
  return m(a, a) * (m(b, b) * m(c, c) - m(b, c) * m(c, b)) -
         m(a, b) * (m(b, a) * m(c, c) - m(b, c) * m(c, a)) +
         m(a, c) * (m(b, a) * m(c, b) - m(b, b) * m(c, a));
}

double det4(const Matrix& m) {
  double acc = 0.0;
  int rows[3];
  for (int k = 0, sign = 1; k < 4; ++k, sign = -sign) {
    int r = 0;
    for (int i = 1; i < 4; ++i) rows[r++] = i;
    // minor over columns != k
    int cols[3];
    int cc = 0;
    for (int j = 0; j < 4; ++j)
      if (j != k) cols[cc++] = j;
    const double minor =
        m(rows[0], cols[0]) * (m(rows[1], cols[1]) * m(rows[2], cols[2]) -
                               m(rows[1], cols[2]) * m(rows[2], cols[1])) -
        m(rows[0], cols[1]) * (m(rows[1], cols[0]) * m(rows[2], cols[2]) -
                               m(rows[1], cols[2]) * m(rows[2], cols[0])) +
        m(rows[0], cols[2]) * (m(rows[1], cols[0]) * m(rows[2], cols[1]) -
                               m(rows[1], cols[1]) * m(rows[2], cols[0]));
    acc += sign * m(0, k) * minor;
  }
  return acc;
}

std::vector<cd> solve_quadratic(double b, double c) {
  // x^2 + b x + c
  const cd disc = std::sqrt(cd(b * b - 4.0 * c, 0.0));
  return {(-b + disc) / 2.0, (-b - disc) / 2.0};
}

std::vector<cd> solve_cubic(double a, double b, double c) {
  // x^3 + a x^2 + b x + c, via the depressed form t^3 + p t + q.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cd shift(-a / 3.0, 0.0);
  if (std::abs(p) < 1e-300 && std::abs(q) < 1e-300)
    return {shift, shift, shift};
  const cd disc = std::sqrt(cd(q * q / 4.0 + p * p * p / 27.0, 0.0));
  // Pick the branch with the larger magnitude to dodge cancellation.
  cd u3 = -q / 2.0 + disc;
  if (std::abs(-q / 2.0 - disc) > std::abs(u3)) u3 = -q / 2.0 - disc;
  const cd u = std::pow(u3, 1.0 / 3.0);
  const cd v = (std::abs(u) > 0.0) ? -p / (3.0 * u) : cd(0.0, 0.0);
  const cd w(-0.5, std::sqrt(3.0) / 2.0);  // primitive cube root of unity
  std::vector<cd> roots(3);
  cd wu = u, wv = v;
  for (int k = 0; k < 3; ++k) {
    roots[k] = wu + wv + shift;
    wu *= w;
    wv *= std::conj(w);
  }
  return roots;
}

std::vector<cd> solve_quartic(double a, double b, double c, double d) {
  // x^4 + a x^3 + b x^2 + c x + d, Ferrari-style: depress, factor into two
  // quadratics (y^2 + alpha y + beta)(y^2 - alpha y + gamma).
  const double p = b - 3.0 * a * a / 8.0;
  const double q = c - a * b / 2.0 + a * a * a / 8.0;
  const double r =
      d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
  const cd shift(-a / 4.0, 0.0);

  std::vector<cd> ys;
  if (std::abs(q) < 1e-12) {
    // Biquadratic: y^2 solves z^2 + p z + r.
    for (const cd& z : solve_quadratic(p, r)) {
      const cd root = std::sqrt(z);
      ys.push_back(root);
      ys.push_back(-root);
    }
  } else {
    // alpha^2 solves the resolvent cubic A^3 + 2p A^2 + (p^2-4r) A - q^2 = 0.
    const auto resolvent = solve_cubic(2.0 * p, p * p - 4.0 * r, -q * q);
    cd A = resolvent[0];
    for (const cd& z : resolvent)
      if (std::abs(z) > std::abs(A)) A = z;
    const cd alpha = std::sqrt(A);
    const cd beta = (p + A - q / alpha) / 2.0;
    const cd gamma = (p + A + q / alpha) / 2.0;
    const cd d1 = std::sqrt(alpha * alpha - 4.0 * beta);
    const cd d2 = std::sqrt(alpha * alpha - 4.0 * gamma);
    ys = {(-alpha + d1) / 2.0, (-alpha - d1) / 2.0, (alpha + d2) / 2.0,
          (alpha - d2) / 2.0};
  }

  std::vector<cd> roots;
  roots.reserve(4);
  for (const cd& y : ys) roots.push_back(y + shift);

  // One Newton polish on the full polynomial (still just the expanded
  // characteristic polynomial; no matrix machinery) to shave off the
  // rounding the radical cascade accumulates.
  for (cd& x : roots) {
    const cd f = ((x + a) * x + b) * x * x + c * x + d +
                 cd(0, 0);  // x^4 + a x^3 + b x^2 + c x + d
    const cd fp = ((4.0 * x + 3.0 * a) * x + 2.0 * b) * x + c;
    if (std::abs(fp) > 1e-12) x -= f / fp;
  }
  return roots;
}

}  // namespace

std::vector<std::complex<double>> charpoly_roots(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > 4)
    throw std::invalid_argument("charpoly_roots: need a square matrix, n <= 4");
  const int n = static_cast<int>(m.rows());

  // Elementary symmetric sums of the eigenvalues = sums of k x k principal
  // minors; det(xI - M) = x^n - e1 x^{n-1} + e2 x^{n-2} - ...
  const double e1 = m.trace();
  double e2 = 0.0, e3 = 0.0, e4 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      e2 += m(i, i) * m(j, j) - m(i, j) * m(j, i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) e3 += det3(m, i, j, k);
  if (n == 4) e4 = det4(m);

  switch (n) {
    case 1: return {cd(m(0, 0), 0.0)};
    case 2: return solve_quadratic(-e1, e2);
    case 3: return solve_cubic(-e1, e2, -e3);
    default: return solve_quartic(-e1, e2, -e3, e4);
  }
}

int brute_force_edge_connectivity(const UndirectedGraph& g) {
  if (g.n < 2) return 0;
  const auto edge_list = g.edges();
  const int m = static_cast<int>(edge_list.size());
  if (m > 20)
    throw std::invalid_argument(
        "brute_force_edge_connectivity: too many edges for exhaustion");

  const auto connected_without = [&](unsigned removed) {
    std::vector<std::vector<int>> adj(g.n);
    for (int e = 0; e < m; ++e)
      if (!(removed & (1u << e))) {
        adj[edge_list[e].first].push_back(edge_list[e].second);
        adj[edge_list[e].second].push_back(edge_list[e].first);
      }
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
    }
    return reached == g.n;
  };

  if (!connected_without(0u)) return 0;
  int best = m;
  for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
    const int pc = std::popcount(mask);
    if (pc >= best) continue;
    if (!connected_without(mask)) best = pc;
  }
  return best;
}

namespace {

// Max pairwise distance under the best assignment (n <= 4: brute force over
// permutations, no Hungarian needed).
double matched_distance(std::vector<cd> a, const std::vector<cd>& b) {
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

CheckResult check_gradients(const GradientFn& grad_fn, int circuits,
                            unsigned long long seed) {
  const double t0 = now_ms();
  Rng rng(seed);
  double worst_rel = 0.0;
  int done = 0;
  bool pass = true;

  SimConfig sim;
  sim.max_steps = 50;  // unrolled depth for the check; plenty of structure
  LossConfig plain;    // lambda = 0; the L1 kink has its own exact check below

  for (int c = 0; c < circuits && pass; ++c) {
    const int n = 2 + static_cast<int>(rng.index(4));  // 2..5
    TargetSpec target = (c % 2 == 0) ? TargetSpec::french_flag()
                                     : TargetSpec::switch_at();
    target.grid_points = 24;  // cheaper FD without losing coverage
    sim.input_mode = (c % 4 < 2) ? InputMode::DriveFirstNode
                                 : InputMode::ClampFirstNode;
    const GeneCircuit circuit = GeneCircuit::random(n, 1.0, rng);

    const LossAndGrad lg = grad_fn(circuit, target, sim, plain);
    const Matrix fd = finite_difference_gradient(circuit, target, sim, plain);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double denom = std::max(std::abs(fd(i, j)), 1e-7);
        worst_rel = std::max(worst_rel,
                             std::abs(lg.grad(i, j) - fd(i, j)) / denom);
      }
    if (worst_rel > 1e-4) pass = false;
    ++done;
  }

  // The L1 term: grad(lambda) must equal grad(0) + lambda * sign(W) with one
  // rounding, i.e. exact as written (finite differences cannot see a kink;
  // the subgradient is checked algebraically instead). Comparing the sum and
  // not the difference keeps the check meaningful in floating point.
  if (pass) {
    const GeneCircuit circuit = GeneCircuit::random(3, 1.0, rng);
    TargetSpec target = TargetSpec::french_flag();
    target.grid_points = 24;
    sim.input_mode = InputMode::DriveFirstNode;
    LossConfig with_l1;
    with_l1.l1_lambda = 0.02;
    const Matrix g0 = grad_fn(circuit, target, sim, plain).grad;
    const Matrix g1 = grad_fn(circuit, target, sim, with_l1).grad;
    for (int i = 0; i < 3 && pass; ++i)
      for (int j = 0; j < 3; ++j) {
        const double sign = (circuit.weights(i, j) > 0.0) -
                            (circuit.weights(i, j) < 0.0);
        if (g1(i, j) != g0(i, j) + with_l1.l1_lambda * sign) {
          pass = false;
          break;
        }
      }
  }

  std::ostringstream detail;
  detail << done << " circuits, worst rel err " << worst_rel;
  return {"gradient_vs_finite_difference", pass, detail.str(), now_ms() - t0};
}

CheckResult check_gradients() {
  return check_gradients(
      [](const GeneCircuit& c, const TargetSpec& t, const SimConfig& s,
         const LossConfig& l) { return loss_and_gradient(c, t, s, l); },
      40, 4242);
}

CheckResult check_eigenvalues(int matrices, unsigned long long seed) {
  const double t0 = now_ms();
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < matrices; ++k) {
    const int n = 2 + k % 3;  // 2, 3, 4
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.gauss();
    worst = std::max(worst, matched_distance(charpoly_roots(m), eigenvalues(m)));
  }
  std::ostringstream detail;
  detail << matrices << " matrices, worst matched distance " << worst;
  return {"eigenvalues_vs_charpoly", worst <= 1e-6, detail.str(),
          now_ms() - t0};
}

CheckResult check_connectivity(int graphs, unsigned long long seed) {
  const double t0 = now_ms();
  Rng rng(seed);
  int mismatches = 0;
  for (int k = 0; k < graphs; ++k) {
    const int n = 2 + static_cast<int>(rng.index(5));  // 2..6
    UndirectedGraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(0.4)) g.add_edge(i, j);
    if (edge_connectivity(g) != brute_force_edge_connectivity(g)) ++mismatches;
  }
  std::ostringstream detail;
  detail << graphs << " graphs, " << mismatches << " mismatches";
  return {"connectivity_vs_bruteforce", mismatches == 0, detail.str(),
          now_ms() - t0};
}

CheckResult check_fixed_point() {
  const double t0 = now_ms();
  bool pass = true;
  std::ostringstream detail;

  // W = 0 decouples the genes: the driven gene settles at phi(0) + x and
  // every other one at phi(0), and the Jacobian is exactly -I.
  GeneCircuit c(4);
  SimConfig sim;
  sim.max_steps = 500;
  sim.convergence_tol = 1e-9;
  const double x = 1.0;

  const SettleResult drive = steady_state(c, x, sim);
  double err = 0.0;
  for (int i = 0; i < 4; ++i)
    err = std::max(err, std::abs(drive.state[i] - (i == 0 ? 1.5 : 0.5)));
  if (!drive.converged || err > 1e-6) pass = false;

  SimConfig clamp_sim = sim;
  clamp_sim.input_mode = InputMode::ClampFirstNode;
  const SettleResult clamp = steady_state(c, x, clamp_sim);
  for (int i = 1; i < 4; ++i)
    err = std::max(err, std::abs(clamp.state[i] - 0.5));
  err = std::max(err, std::abs(clamp.state[0] - x));
  if (!clamp.converged) pass = false;

  double eig_err = 0.0;
  for (const auto& ev : eigenvalues(jacobian(c, drive.state)))
    eig_err = std::max(eig_err, std::abs(ev - cd(-1.0, 0.0)));
  if (err > 1e-6 || eig_err > 1e-9) pass = false;

  detail << "state err " << err << ", eigenvalue err " << eig_err;
  return {"analytic_fixed_point", pass, detail.str(), now_ms() - t0};
}

std::vector<CheckResult> verify_suite() {
  return {check_fixed_point(), check_gradients(), check_eigenvalues(),
          check_connectivity()};
}

}  // namespace gcl
