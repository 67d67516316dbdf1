#pragma once

// Nearest-neighbour walk on a lazily expanded arena:
//   p(x, x^i) = A(x^i) / (1 + sum_j A(x^j)),  p(x, parent) = 1 - sum_i p(x, x^i),
// and the virtual parent of the root returns to the root with probability 1.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rwre/arena.hpp"
#include "rwre/env.hpp"

namespace rwre {

enum class StopKind { kSteps, kRootReturns, kHitGeneration };

struct StopRule {
  StopKind kind = StopKind::kSteps;
  std::uint64_t value = 0;  // n for STEPS / ROOT_RETURNS, m for HIT_GENERATION

  static StopRule steps(std::uint64_t n) { return {StopKind::kSteps, n}; }
  static StopRule root_returns(std::uint64_t n) { return {StopKind::kRootReturns, n}; }
  static StopRule hit_generation(std::uint64_t m) { return {StopKind::kHitGeneration, m}; }
};

struct Transition {
  VertexId target;  // kVirtualParent for the root's parent slot
  double probability;
};

// Outgoing distribution at x (x may be kVirtualParent). Expands x on first query.
std::vector<Transition> transition_distribution(TreeArena& arena, VertexId x);

// Scalar view of the observables at one instant.
struct Snapshot {
  std::uint64_t steps = 0;
  std::uint64_t root_returns = 0;
  std::uint32_t largest_full_generation = 0;  // R
  std::uint32_t max_generation = 0;           // X*
  std::uint64_t root_local_time = 0;          // l(root, n)
  bool extinct = false;
  bool truncated = false;

  bool operator==(const Snapshot&) const = default;
};

struct WalkObservables {
  std::uint64_t steps = 0;
  VertexId position = kRoot;
  // Indexed by vertex id; counts visits at times 1..n. A count passing 2^32 - 1
  // raises ResourceError.
  ChunkedArray<std::uint32_t> local_times;
  std::uint64_t virtual_parent_local_time = 0;
  std::uint64_t root_local_time = 0;
  std::uint64_t root_returns = 0;
  std::vector<std::uint64_t> visited_per_generation;
  std::uint32_t largest_full_generation = 0;
  std::uint32_t max_generation = 0;
  bool extinct_flag = false;
  bool truncated_flag = false;

  std::uint64_t local_time(VertexId x) const { return x < local_times.size() ? local_times[x] : 0; }
  Snapshot snapshot() const;
};

// Advances R over the prefix of finalized, fully visited generations and returns it.
std::uint32_t update_largest_full_generation(WalkObservables& obs, const TreeArena& arena);

/// Single trajectory. Owns its arena; the tree and walk draw from independent streams.
class Walker {
 public:
  Walker(const EnvironmentSpec& spec, std::uint64_t tree_seed, std::uint64_t walk_seed);
  Walker(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed, std::uint64_t walk_seed);

  // One step of the chain. Sets extinct_flag when the whole tree has been expanded.
  void step();

  const WalkObservables& observables() const { return obs_; }
  const TreeArena& arena() const { return arena_; }
  VertexId position() const { return obs_.position; }

 private:
  void on_first_visit(VertexId x);
  VertexId sample_next(VertexId x);

  TreeArena arena_;
  WalkObservables obs_;
  std::mt19937_64 rng_;
  std::uint32_t generation_ = 0;  // generation of the current position
};

struct RunOptions {
  // Step budget; exceeding it ends the run with truncated = true.
  std::uint64_t step_cap = UINT64_MAX;
};

struct RunResult {
  std::vector<Snapshot> snapshots;  // one per checkpoint, then the stop snapshot if distinct
  WalkObservables final_state;
};

// Simulates from the root until the stop rule fires. Checkpoints are in the stop
// rule's unit (steps or returns) and must be sorted and <= the stop value. A run on
// a tree found to be extinct ends early with extinct = true.
RunResult run(const EnvironmentSpec& spec, std::uint64_t tree_seed, std::uint64_t walk_seed, StopRule stop,
              std::span<const std::uint64_t> checkpoints, RunOptions options = {});
RunResult run(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed, std::uint64_t walk_seed,
              StopRule stop, std::span<const std::uint64_t> checkpoints, RunOptions options = {});

}  // namespace rwre
