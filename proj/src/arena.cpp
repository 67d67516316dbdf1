#include "rwre/arena.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

TreeArena::TreeArena(const EnvironmentSpec& spec, std::uint64_t tree_seed)
    : TreeArena(std::make_shared<const ChildSampler>(spec), tree_seed) {}

TreeArena::TreeArena(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed)
    : sampler_(std::move(sampler)), tree_seed_(tree_seed) {
  push_vertex(kVirtualParent, kNoWeight, root_key(tree_seed));
  created_ = {1};
  expanded_ = {0};
}

void TreeArena::push_vertex(VertexId parent, std::uint16_t weight_index, std::uint64_t key) {
  if (parent_.size() >= static_cast<std::size_t>(kUnexpanded) - 1) {
    throw ResourceError("tree arena exceeded the 32-bit vertex id space");
  }
  parent_.push_back(parent);
  weight_index_.push_back(weight_index);
  key_.push_back(key);
  child_first_.push_back(kUnexpanded);
  child_count_.push_back(0);
  ++unexpanded_;
}

std::uint32_t TreeArena::generation(VertexId x) const {
  std::uint32_t g = 0;
  for (VertexId v = x; v != kRoot; v = parent_[v]) ++g;
  return g;
}

ChildRange TreeArena::expand(VertexId x) {
  if (!contains(x)) throw UsageError("expand: unknown vertex " + std::to_string(x));
  return expand_at(x, generation(x));
}

ChildRange TreeArena::expand_at(VertexId x, std::uint32_t generation) {
  if (!contains(x)) throw UsageError("expand: unknown vertex " + std::to_string(x));
  if (is_expanded(x)) throw UsageError("expand: vertex " + std::to_string(x) + " is already expanded");

  scratch_.clear();
  const std::uint32_t n = sampler_->draw_indices(key_[x], scratch_);
  const auto first = static_cast<VertexId>(parent_.size());
  const std::uint32_t g = generation + 1;
  const std::uint64_t kx = key_[x];
  for (std::uint32_t i = 0; i < n; ++i) push_vertex(x, scratch_[i], child_key(kx, i));
  child_first_[x] = first;
  child_count_[x] = static_cast<std::uint16_t>(n);
  --unexpanded_;

  if (created_.size() <= g) {
    created_.resize(g + 1, 0);
    expanded_.resize(g + 1, 0);
  }
  created_[g] += n;
  ++expanded_[g - 1];
  advance_finalized();
  return {first, n};
}

double TreeArena::potential(VertexId x) const {
  // Same summation order as the recursion V(child) = V(parent) - log A(child).
  std::vector<std::uint16_t> path;
  for (VertexId v = x; v != kRoot; v = parent_[v]) path.push_back(weight_index_[v]);
  double vx = 0.0;
  for (auto it = path.rbegin(); it != path.rend(); ++it) vx += sampler_->weight_neg_log(*it);
  return vx;
}

std::size_t TreeArena::memory_bytes() const {
  return parent_.bytes() + weight_index_.bytes() + key_.bytes() + child_first_.bytes() +
         child_count_.bytes();
}

void TreeArena::advance_finalized() {
  // Generation f+1 is complete once generation f is complete and fully expanded.
  while (true) {
    const std::uint32_t f = finalized_depth_;
    if (created_[f] == 0) return;
    if (expanded_[f] != created_[f]) return;
    finalized_depth_ = f + 1;
    if (created_.size() <= finalized_depth_) {
      created_.resize(finalized_depth_ + 1, 0);
      expanded_.resize(finalized_depth_ + 1, 0);
    }
  }
}

bool TreeArena::finalized(std::uint32_t k) const {
  if (k <= finalized_depth_) return true;
  // Everything below an empty finalized generation is empty too.
  return created(finalized_depth_) == 0;
}

void TreeArena::check_invariants() const {
  auto fail = [](const std::string& what, VertexId x) {
    throw std::logic_error("arena invariant violated at vertex " + std::to_string(x) + ": " + what);
  };
  if (weight_index_[kRoot] != kNoWeight) fail("root carries a weight", kRoot);
  std::vector<std::uint64_t> count(created_.size(), 0);
  std::vector<std::uint64_t> expanded(created_.size(), 0);
  std::vector<std::uint32_t> gen(size(), 0);
  for (VertexId x = 0; x < size(); ++x) {
    if (x != kRoot) {
      const VertexId p = parent_[x];
      if (p >= x) fail("parent id not smaller than child id", x);
      gen[x] = gen[p] + 1;
    }
    if (gen[x] >= count.size()) fail("vertex deeper than the generation totals", x);
    ++count[gen[x]];
    if (x != kRoot) {
      if (weight_index_[x] == kNoWeight) fail("non-root vertex without a weight", x);
    }
    if (is_expanded(x)) {
      ++expanded[gen[x]];
      for (VertexId c : children(x).ids()) {
        if (parent_[c] != x) fail("child does not point back to parent", x);
      }
    }
  }
  for (std::size_t k = 0; k < created_.size(); ++k) {
    if (count[k] != created_[k]) fail("generation total mismatch at generation " + std::to_string(k), kRoot);
    if (expanded[k] != expanded_[k]) fail("expanded total mismatch at generation " + std::to_string(k), kRoot);
  }
  for (std::uint32_t k = 1; k <= finalized_depth_; ++k) {
    if (expanded_[k - 1] != created_[k - 1]) fail("finalized generation has an unexpanded parent", kRoot);
  }
}

std::vector<VertexId> path_from_root(const TreeArena& arena, VertexId x) {
  if (!arena.contains(x)) throw UsageError("unknown vertex " + std::to_string(x));
  std::vector<VertexId> path;
  path.reserve(arena.generation(x));
  for (VertexId v = x; v != kRoot; v = arena.parent(v)) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<double> potential_along_path(const TreeArena& arena, VertexId x) {
  std::vector<double> out;
  double v = 0.0;
  for (VertexId y : path_from_root(arena, x)) {
    v += -std::log(arena.weight(y));  // equals the sampler's cached -log A
    out.push_back(v);
  }
  return out;
}

bool detect_extinction(const TreeArena& arena) { return arena.unexpanded_count() == 0; }

}  // namespace rwre
