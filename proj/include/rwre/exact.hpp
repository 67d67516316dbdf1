#pragma once

// Exact quenched quantities on a finite window of the tree.
//
// A FrozenTree is an arena expanded breadth-first through generation depth-1,
// so generations 0..depth are complete. Vertices at generation `depth` have no
// known children; the oracle chain reflects them to their parent.

#include <cstdint>
#include <vector>

#include "rwre/arena.hpp"
#include "rwre/env.hpp"

namespace rwre {

inline constexpr std::size_t kDefaultFreezeCap = 20'000'000;

struct FrozenTree {
  TreeArena arena;
  std::uint32_t depth = 0;
  bool extinct = false;  // the whole tree died out above `depth`
  std::vector<std::uint32_t> generations;  // per vertex id

  std::uint32_t generation(VertexId x) const { return generations[x]; }

  std::size_t vertex_count() const { return arena.size(); }
};

// Throws ResourceError naming the generation at which the vertex cap was exceeded.
FrozenTree freeze(const EnvironmentSpec& spec, std::uint32_t depth, std::uint64_t tree_seed,
                  std::size_t vertex_cap = kDefaultFreezeCap);

// P_{x'_x}(T_x < T_{x'}) = e^{V(x'_x)} / sum_{z in ]x', x]} e^{V(z)}, where x'_x is the
// child of x' on the path to x.
double path_hit_prob_up(const FrozenTree& tree, VertexId ancestor, VertexId x);
// P_{parent(x)}(T_{x'} < T_x) = e^{V(x)} / sum_{z in ]x', x]} e^{V(z)}.
double path_hit_prob_down(const FrozenTree& tree, VertexId ancestor, VertexId x);

// beta_m(x) = P_x(hit generation m before parent(x)); NaN below generation m.
std::vector<double> beta_recursion(const FrozenTree& tree, std::uint32_t m);

// rho_m = sum_i p(root, root^i) beta_m(root^i).
double rho(const FrozenTree& tree, std::uint32_t m);
double rho_from_beta(const FrozenTree& tree, const std::vector<double>& beta);

// gamma_m from the three-case recursion; NaN below generation m.
std::vector<double> gamma_recursion(const FrozenTree& tree, std::uint32_t m, const std::vector<double>& beta);

// gamma_m(root) / rho_m. Throws DegenerateInputError when rho_m = 0.
double expected_hit_time(const FrozenTree& tree, std::uint32_t m);

// (gamma_m(root) + 1 + p(root, parent)) / rho_m: the mean hitting time including the
// excursions that return through the root's parent. Throws DegenerateInputError when rho_m = 0.
double expected_hit_time_with_root_term(const FrozenTree& tree, std::uint32_t m);

struct ExactQuantities {
  std::uint32_t m = 0;
  std::vector<double> beta;
  std::vector<double> gamma;
  double rho = 0;
  double expected_hit_time = 0;  // NaN when rho = 0
  double expected_hit_time_with_root_term = 0;  // NaN when rho = 0
};

ExactQuantities compute_exact(const FrozenTree& tree, std::uint32_t m);

// Membership over the chain's states: every arena vertex plus the virtual parent.
class StateSet {
 public:
  explicit StateSet(std::size_t vertex_count) : member_(vertex_count, 0) {}

  void insert(VertexId x);
  bool contains(VertexId x) const { return x == kVirtualParent ? virtual_parent_ : member_[x] != 0; }

  static StateSet generation(const FrozenTree& tree, std::uint32_t g);
  static StateSet single(const FrozenTree& tree, VertexId x);

 private:
  std::vector<char> member_;
  bool virtual_parent_ = false;
};

enum class OracleMethod { kTreeElimination, kGaussSeidel };

// P_start(T_target < T_avoid) with hitting times counted from step 1.
double oracle_hit_prob(const FrozenTree& tree, VertexId start, const StateSet& target, const StateSet& avoid,
                       OracleMethod method = OracleMethod::kTreeElimination);

// Full solution vector of the absorbing problem: value at every state (index size()
// holds the virtual parent). Absorbing states carry 1 (target) or 0 (avoid).
std::vector<double> oracle_hit_prob_all(const FrozenTree& tree, const StateSet& target, const StateSet& avoid,
                                        OracleMethod method = OracleMethod::kTreeElimination);

// E_start[first time generation m is hit].
double oracle_expected_time(const FrozenTree& tree, VertexId start, std::uint32_t target_generation,
                            OracleMethod method = OracleMethod::kTreeElimination);

}  // namespace rwre
