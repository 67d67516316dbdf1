#include "rwre/walk.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {
std::vector<Transition> transition_distribution(TreeArena& arena, VertexId x) {
  if (x == kVirtualParent) return {{kRoot, 1.0}};
  if (!arena.contains(x)) throw UsageError("transition_distribution: unknown vertex " + std::to_string(x));
  const ChildRange kids = arena.ensure_expanded(x);
  double total = 1.0;
  for (VertexId c : kids.ids()) total += arena.weight(c);
  std::vector<Transition> out;
  out.reserve(kids.count + 1);
  double to_children = 0.0;
  for (VertexId c : kids.ids()) {
    const double p = arena.weight(c) / total;
    to_children += p;
    out.push_back({c, p});
  }
  out.push_back({arena.parent(x), 1.0 - to_children});
  return out;
}

Snapshot WalkObservables::snapshot() const {
  return Snapshot{steps, root_returns, largest_full_generation, max_generation, root_local_time, extinct_flag,
                  truncated_flag};
}

std::uint32_t update_largest_full_generation(WalkObservables& obs, const TreeArena& arena) {
  // Parents are visited before their children, so fully visited generations form a prefix.
  while (true) {
    const std::uint32_t k = obs.largest_full_generation + 1;
    if (!arena.finalized(k)) break;
    const std::uint64_t z = arena.created(k);
    if (z == 0) break;
    if (k >= obs.visited_per_generation.size() || obs.visited_per_generation[k] != z) break;
    obs.largest_full_generation = k;
  }
  return obs.largest_full_generation;
}

Walker::Walker(const EnvironmentSpec& spec, std::uint64_t tree_seed, std::uint64_t walk_seed)
    : Walker(std::make_shared<const ChildSampler>(spec), tree_seed, walk_seed) {}

Walker::Walker(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed, std::uint64_t walk_seed)
    : arena_(std::move(sampler), tree_seed), rng_(walk_seed) {
  arena_.expand(kRoot);
  obs_.local_times.assign(arena_.size(), 0);
  obs_.visited_per_generation.assign(2, 0);
  obs_.extinct_flag = detect_extinction(arena_);
}

VertexId Walker::sample_next(VertexId x) {
  // Inverse CDF over children in order, then the parent. N is small, so a scan
  // beats a per-vertex table and needs no storage.
  const ChildRange kids = arena_.children(x);
  double total = 1.0;
  for (VertexId c = kids.first; c < kids.first + kids.count; ++c) total += arena_.weight(c);
  double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * total;
  for (VertexId c = kids.first; c < kids.first + kids.count; ++c) {
    u -= arena_.weight(c);
    if (u < 0.0) return c;
  }
  return arena_.parent(x);
}

void Walker::on_first_visit(VertexId x) {
  const std::uint32_t g = generation_;
  if (obs_.visited_per_generation.size() <= g + 1) obs_.visited_per_generation.resize(g + 2, 0);
  ++obs_.visited_per_generation[g];
  if (!arena_.is_expanded(x)) {
    arena_.expand_at(x, g);
    obs_.local_times.resize(arena_.size(), 0);
    if (detect_extinction(arena_)) obs_.extinct_flag = true;
  }
  update_largest_full_generation(obs_, arena_);
}

void Walker::step() {
  const VertexId from = obs_.position;
  const VertexId next = from == kVirtualParent ? kRoot : sample_next(from);
  ++obs_.steps;
  obs_.position = next;
  if (next == kVirtualParent) {
    ++obs_.virtual_parent_local_time;
    return;
  }
  // Children always have larger ids than their parent.
  if (from == kVirtualParent) {
    generation_ = 0;
  } else if (next > from) {
    ++generation_;
  } else {
    --generation_;
  }
  const std::uint32_t visits = ++obs_.local_times[next];
  if (visits == 0) throw ResourceError("local time at a vertex exceeded 2^32 - 1");
  if (next == kRoot) {
    ++obs_.root_returns;
    ++obs_.root_local_time;
  }
  if (generation_ > obs_.max_generation) obs_.max_generation = generation_;
  if (visits == 1) on_first_visit(next);
}

RunResult run(const EnvironmentSpec& spec, std::uint64_t tree_seed, std::uint64_t walk_seed, StopRule stop,
              std::span<const std::uint64_t> checkpoints, RunOptions options) {
  return run(std::make_shared<const ChildSampler>(spec), tree_seed, walk_seed, stop, checkpoints, options);
}

RunResult run(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed, std::uint64_t walk_seed,
              StopRule stop, std::span<const std::uint64_t> checkpoints, RunOptions options) {
  if (stop.kind != StopKind::kSteps && stop.value == 0) throw UsageError("stop rule parameter must be positive");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) throw UsageError("checkpoints must be sorted");
  if (!checkpoints.empty() && checkpoints.back() > stop.value) {
    throw UsageError("checkpoint beyond the stop rule parameter");
  }

  Walker walker(std::move(sampler), tree_seed, walk_seed);
  const WalkObservables& obs = walker.observables();
  auto unit = [&]() -> std::uint64_t {
    switch (stop.kind) {
      case StopKind::kSteps: return obs.steps;
      case StopKind::kRootReturns: return obs.root_returns;
      case StopKind::kHitGeneration: return obs.max_generation;
    }
    return 0;
  };

  RunResult result;
  bool aborted = obs.extinct_flag;
  bool truncated = false;
  auto advance_to = [&](std::uint64_t target) {
    while (!aborted && unit() < target) {
      if (obs.steps >= options.step_cap) {
        truncated = true;
        aborted = true;
        return;
      }
      walker.step();
      aborted = obs.extinct_flag;
    }
  };

  for (std::uint64_t cp : checkpoints) {
    advance_to(cp);
    if (aborted) break;
    result.snapshots.push_back(obs.snapshot());
  }
  if (!aborted) advance_to(stop.value);
  if (aborted || checkpoints.empty() || checkpoints.back() != stop.value) {
    result.final_state = obs;
    result.final_state.truncated_flag = truncated;
    result.snapshots.push_back(result.final_state.snapshot());
    return result;
  }
  result.final_state = obs;
  return result;
}

}  // namespace rwre
