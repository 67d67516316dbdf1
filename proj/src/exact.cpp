#include "rwre/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/kernels.hpp"

namespace rwre {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxSweeps = 1'000'000;
constexpr double kResidualTolerance = 1e-13;

void require_generation_in_range(const FrozenTree& tree, std::uint32_t m, const char* what) {
  if (m < 1 || m > tree.depth) {
    throw UsageError(std::string(what) + ": m=" + std::to_string(m) + " outside [1, " + std::to_string(tree.depth) +
                     "]");
  }
}

// Values of V on ]ancestor, x], checking the ancestry on the way.
std::vector<double> path_potentials(const FrozenTree& tree, VertexId ancestor, VertexId x) {
  const TreeArena& a = tree.arena;
  if (!a.contains(ancestor) || !a.contains(x)) throw UsageError("path probability: unknown vertex");
  if (tree.generation(ancestor) >= tree.generation(x)) throw UsageError("path probability: not a strict ancestor");
  std::vector<double> v;
  VertexId y = x;
  while (tree.generation(y) > tree.generation(ancestor)) {
    v.push_back(a.potential(y));
    y = a.parent(y);
  }
  if (y != ancestor) throw UsageError("path probability: not a strict ancestor");
  std::reverse(v.begin(), v.end());
  return v;
}

// Sum of A over the children of x (zero for leaves and the depth boundary).
double child_weight_sum(const TreeArena& a, VertexId x) {
  double s = 0.0;
  for (VertexId c : a.children(x).ids()) s += a.weight(c);
  return s;
}

// The chain on the frozen window, written independently of the walk module.
// Boundary vertices (unexpanded) step to their parent with probability 1.
struct Chain {
  const TreeArena& arena;
  std::size_t n;  // state n is the virtual parent

  std::size_t parent_state(VertexId x) const { return x == kRoot ? n : arena.parent(x); }
};

// Solves h(s) = reward(s) + sum_y p(s,y) h(y) on free states, h = value on absorbing ones.
struct AbsorbingProblem {
  std::vector<char> absorbing;  // size n+1
  std::vector<double> value;    // absorbing values, size n+1
  std::vector<double> reward;   // size n+1
};

std::vector<double> solve_by_elimination(const Chain& chain, const AbsorbingProblem& prob) {
  const TreeArena& a = chain.arena;
  const std::size_t n = chain.n;
  // h(x) = coef_a[x] + coef_b[x] * h(parent(x)) for free x.
  std::vector<double> ca(n, 0.0);
  std::vector<double> cb(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const auto x = static_cast<VertexId>(i);
    if (prob.absorbing[x]) continue;
    const double total = 1.0 + child_weight_sum(a, x);
    double constant = prob.reward[x];
    double self = 0.0;
    for (VertexId c : a.children(x).ids()) {
      const double p = a.weight(c) / total;
      if (prob.absorbing[c]) {
        constant += p * prob.value[c];
      } else {
        constant += p * ca[c];
        self += p * cb[c];
      }
    }
    const double denom = 1.0 - self;
    ca[x] = constant / denom;
    cb[x] = (1.0 / total) / denom;
  }

  std::vector<double> h(n + 1, 0.0);
  // Virtual parent and root.
  if (prob.absorbing[n]) {
    h[n] = prob.value[n];
    h[kRoot] = prob.absorbing[kRoot] ? prob.value[kRoot] : ca[kRoot] + cb[kRoot] * h[n];
  } else if (prob.absorbing[kRoot]) {
    h[kRoot] = prob.value[kRoot];
    h[n] = prob.reward[n] + h[kRoot];
  } else {
    // h(root) = ca + cb (reward(vp) + h(root))
    const double denom = 1.0 - cb[kRoot];
    if (!(denom > 0.0)) throw NumericalError("oracle: singular system (no absorbing state reachable)");
    h[kRoot] = (ca[kRoot] + cb[kRoot] * prob.reward[n]) / denom;
    h[n] = prob.reward[n] + h[kRoot];
  }
  for (std::size_t i = 1; i < n; ++i) {
    const auto x = static_cast<VertexId>(i);
    h[x] = prob.absorbing[x] ? prob.value[x] : ca[x] + cb[x] * h[a.parent(x)];
  }
  return h;
}

std::vector<double> solve_by_gauss_seidel(const Chain& chain, const AbsorbingProblem& prob) {
  const TreeArena& a = chain.arena;
  const std::size_t n = chain.n;
  std::vector<double> h(n + 1, 0.0);
  std::vector<double> inv_total(n);
  for (std::size_t s = 0; s <= n; ++s) {
    if (prob.absorbing[s]) h[s] = prob.value[s];
  }
  for (std::size_t i = 0; i < n; ++i) inv_total[i] = 1.0 / (1.0 + child_weight_sum(a, static_cast<VertexId>(i)));

  auto update = [&](std::size_t s) -> double {
    if (prob.absorbing[s]) return 0.0;
    double next;
    if (s == n) {
      next = prob.reward[n] + h[kRoot];
    } else {
      const auto x = static_cast<VertexId>(s);
      double acc = prob.reward[s] + inv_total[s] * h[chain.parent_state(x)];
      for (VertexId c : a.children(x).ids()) acc += a.weight(c) * inv_total[s] * h[c];
      next = acc;
    }
    const double delta = std::abs(next - h[s]);
    h[s] = next;
    return delta;
  };

  double previous = std::numeric_limits<double>::infinity();
  std::size_t stagnant = 0;
  double rates[3] = {1.0, 1.0, 1.0};
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double change = update(n);
    for (std::size_t s = 0; s < n; ++s) change = std::max(change, update(s));
    for (std::size_t s = n; s-- > 0;) change = std::max(change, update(s));
    change = std::max(change, update(n));

    double scale = 1.0;
    for (double v : h) scale = std::max(scale, std::abs(v));
    if (change == 0.0) return h;
    // Geometric convergence: remaining error ~ change * rate / (1 - rate), with the
    // rate taken as the largest of the last three sweep ratios.
    rates[sweep % 3] = change / previous;
    if (sweep >= 3) {
      const double rate = std::max({rates[0], rates[1], rates[2]});
      if (rate < 1.0) {
        const double err = change * rate / (1.0 - rate);
        if (err <= kResidualTolerance * 1e-2 * scale) return h;
      }
    }
    if (change <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      if (++stagnant >= 8) return h;
    } else {
      stagnant = 0;
    }
    previous = change;
  }
  throw NumericalError("oracle: Gauss-Seidel did not converge within 1e6 sweeps");
}

std::vector<double> solve(const Chain& chain, const AbsorbingProblem& prob, OracleMethod method) {
  return method == OracleMethod::kTreeElimination ? solve_by_elimination(chain, prob)
                                                  : solve_by_gauss_seidel(chain, prob);
}

std::size_t state_index(const FrozenTree& tree, VertexId x) { return x == kVirtualParent ? tree.vertex_count() : x; }

// First-step evaluation from `start` given the solution on all states.
double first_step_value(const FrozenTree& tree, const std::vector<double>& h, VertexId start, double reward) {
  const TreeArena& a = tree.arena;
  if (start == kVirtualParent) return reward + h[kRoot];
  const double total = 1.0 + child_weight_sum(a, start);
  double acc = reward + h[state_index(tree, a.parent(start))] / total;
  for (VertexId c : a.children(start).ids()) acc += a.weight(c) / total * h[c];
  return acc;
}

}  // namespace

FrozenTree freeze(const EnvironmentSpec& spec, std::uint32_t depth, std::uint64_t tree_seed, std::size_t vertex_cap) {
  if (depth < 1) throw UsageError("freeze: depth must be >= 1");
  FrozenTree tree{TreeArena(spec, tree_seed), depth, false, {0}};
  TreeArena& a = tree.arena;
  auto& gen = tree.generations;
  for (VertexId x = 0; x < a.size(); ++x) {
    if (gen[x] >= depth) break;  // breadth-first order: everything after is deeper
    a.expand_at(x, gen[x]);
    gen.resize(a.size(), gen[x] + 1);
    if (a.size() > vertex_cap) {
      throw ResourceError("freeze: vertex cap " + std::to_string(vertex_cap) + " exceeded at generation " +
                          std::to_string(gen[x] + 1));
    }
  }
  tree.extinct = detect_extinction(a);
  return tree;
}

double path_hit_prob_up(const FrozenTree& tree, VertexId ancestor, VertexId x) {
  const std::vector<double> v = path_potentials(tree, ancestor, x);
  return std::exp(v.front() - kernels::log_sum_exp(v));
}

double path_hit_prob_down(const FrozenTree& tree, VertexId ancestor, VertexId x) {
  const std::vector<double> v = path_potentials(tree, ancestor, x);
  return std::exp(v.back() - kernels::log_sum_exp(v));
}

std::vector<double> beta_recursion(const FrozenTree& tree, std::uint32_t m) {
  require_generation_in_range(tree, m, "beta_recursion");
  const TreeArena& a = tree.arena;
  std::vector<double> beta(a.size(), kNaN);
  // Children carry larger ids than parents, so one reverse sweep is bottom-up.
  for (std::size_t i = a.size(); i-- > 0;) {
    const auto x = static_cast<VertexId>(i);
    const std::uint32_t g = tree.generation(x);
    if (g > m) continue;
    if (g == m) {
      beta[x] = 1.0;
      continue;
    }
    double s = 0.0;
    for (VertexId c : a.children(x).ids()) s += a.weight(c) * beta[c];
    beta[x] = s / (1.0 + s);  // dead leaves: s = 0
  }
  return beta;
}

double rho_from_beta(const FrozenTree& tree, const std::vector<double>& beta) {
  const TreeArena& a = tree.arena;
  const double total = 1.0 + child_weight_sum(a, kRoot);
  double r = 0.0;
  for (VertexId c : a.children(kRoot).ids()) r += a.weight(c) / total * beta[c];
  return r;
}

double rho(const FrozenTree& tree, std::uint32_t m) { return rho_from_beta(tree, beta_recursion(tree, m)); }

std::vector<double> gamma_recursion(const FrozenTree& tree, std::uint32_t m, const std::vector<double>& beta) {
  require_generation_in_range(tree, m, "gamma_recursion");
  const TreeArena& a = tree.arena;
  if (beta.size() != a.size()) throw UsageError("gamma_recursion: beta does not match the tree");
  std::vector<double> gamma(a.size(), kNaN);
  for (std::size_t i = a.size(); i-- > 1;) {
    const auto x = static_cast<VertexId>(i);
    const std::uint32_t g = tree.generation(x);
    if (g > m) continue;
    if (g == m) {
      gamma[x] = 0.0;
      continue;
    }
    // 1/p(x, parent) = 1 + sum_i A(x^i)
    double weight_sum = 0.0;
    double num = 0.0;
    double den = 1.0;
    for (VertexId c : a.children(x).ids()) {
      weight_sum += a.weight(c);
      num += a.weight(c) * gamma[c];
      den += a.weight(c) * beta[c];
    }
    gamma[x] = (1.0 + weight_sum + num) / den;
  }
  const double total = 1.0 + child_weight_sum(a, kRoot);
  double root = 0.0;
  for (VertexId c : a.children(kRoot).ids()) root += a.weight(c) / total * gamma[c];
  gamma[kRoot] = root;
  return gamma;
}

double expected_hit_time(const FrozenTree& tree, std::uint32_t m) {
  const std::vector<double> beta = beta_recursion(tree, m);
  const double r = rho_from_beta(tree, beta);
  if (!(r > 0.0)) throw DegenerateInputError("expected_hit_time: rho_m = 0 (generation m unreachable)");
  return gamma_recursion(tree, m, beta)[kRoot] / r;
}

double expected_hit_time_with_root_term(const FrozenTree& tree, std::uint32_t m) {
  const std::vector<double> beta = beta_recursion(tree, m);
  const double r = rho_from_beta(tree, beta);
  if (!(r > 0.0)) throw DegenerateInputError("expected_hit_time: rho_m = 0 (generation m unreachable)");
  const double to_parent = 1.0 / (1.0 + child_weight_sum(tree.arena, kRoot));
  return (gamma_recursion(tree, m, beta)[kRoot] + 1.0 + to_parent) / r;
}

ExactQuantities compute_exact(const FrozenTree& tree, std::uint32_t m) {
  ExactQuantities q;
  q.m = m;
  q.beta = beta_recursion(tree, m);
  q.rho = rho_from_beta(tree, q.beta);
  q.gamma = gamma_recursion(tree, m, q.beta);
  q.expected_hit_time = q.rho > 0.0 ? q.gamma[kRoot] / q.rho : kNaN;
  q.expected_hit_time_with_root_term =
      q.rho > 0.0 ? (q.gamma[kRoot] + 1.0 + 1.0 / (1.0 + child_weight_sum(tree.arena, kRoot))) / q.rho : kNaN;
  return q;
}

void StateSet::insert(VertexId x) {
  if (x == kVirtualParent) {
    virtual_parent_ = true;
  } else {
    member_.at(x) = 1;
  }
}

StateSet StateSet::generation(const FrozenTree& tree, std::uint32_t g) {
  StateSet s(tree.vertex_count());
  for (VertexId x = 0; x < tree.vertex_count(); ++x) {
    if (tree.generation(x) == g) s.insert(x);
  }
  return s;
}

StateSet StateSet::single(const FrozenTree& tree, VertexId x) {
  StateSet s(tree.vertex_count());
  s.insert(x);
  return s;
}

std::vector<double> oracle_hit_prob_all(const FrozenTree& tree, const StateSet& target, const StateSet& avoid,
                                        OracleMethod method) {
  const std::size_t n = tree.vertex_count();
  AbsorbingProblem prob{std::vector<char>(n + 1, 0), std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  for (std::size_t s = 0; s <= n; ++s) {
    const VertexId x = s == n ? kVirtualParent : static_cast<VertexId>(s);
    if (target.contains(x)) {
      prob.absorbing[s] = 1;
      prob.value[s] = 1.0;
    } else if (avoid.contains(x)) {
      prob.absorbing[s] = 1;
    }
  }
  return solve(Chain{tree.arena, n}, prob, method);
}

double oracle_hit_prob(const FrozenTree& tree, VertexId start, const StateSet& target, const StateSet& avoid,
                       OracleMethod method) {
  if (start != kVirtualParent && !tree.arena.contains(start)) throw UsageError("oracle: unknown start vertex");
  const std::vector<double> h = oracle_hit_prob_all(tree, target, avoid, method);
  return first_step_value(tree, h, start, 0.0);
}

double oracle_expected_time(const FrozenTree& tree, VertexId start, std::uint32_t target_generation,
                            OracleMethod method) {
  require_generation_in_range(tree, target_generation, "oracle_expected_time");
  if (start != kVirtualParent && !tree.arena.contains(start)) throw UsageError("oracle: unknown start vertex");
  const TreeArena& a = tree.arena;
  const std::size_t n = tree.vertex_count();
  AbsorbingProblem prob{std::vector<char>(n + 1, 0), std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 1.0)};
  for (VertexId x = 0; x < n; ++x) {
    if (tree.generation(x) >= target_generation) prob.absorbing[x] = 1;
  }
  const std::vector<double> t = solve(Chain{a, n}, prob, method);
  return t[state_index(tree, start)];
}

}  // namespace rwre
