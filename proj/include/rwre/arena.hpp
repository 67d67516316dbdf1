#pragma once

// Lazily expanded Galton-Watson tree carrying the edge weights A(x) and the
// potential V(x) = -sum_{z in ]root, x]} log A(z). Storage is 20 bytes per
// created vertex; generations and potentials are recomputed from parent links.

#include <cstdint>
#include <limits>
#include <memory>
#include <ranges>
#include <vector>

#include "rwre/chunked.hpp"
#include "rwre/env.hpp"

namespace rwre {

using VertexId = std::uint32_t;

inline constexpr VertexId kRoot = 0;
// Parent of the root; also the walk's virtual state above the root.
inline constexpr VertexId kVirtualParent = std::numeric_limits<VertexId>::max();

struct ChildRange {
  VertexId first = 0;
  std::uint32_t count = 0;

  auto ids() const { return std::views::iota(first, first + count); }
  bool empty() const { return count == 0; }
};

class TreeArena {
 public:
  TreeArena(const EnvironmentSpec& spec, std::uint64_t tree_seed);
  TreeArena(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed);

  std::uint64_t tree_seed() const { return tree_seed_; }
  std::size_t size() const { return parent_.size(); }
  bool contains(VertexId x) const { return x < parent_.size(); }

  VertexId parent(VertexId x) const { return parent_[x]; }
  // Counted up the parent chain, O(generation(x)).
  std::uint32_t generation(VertexId x) const;
  // A(x); the root carries 1.0, which no formula reads.
  double weight(VertexId x) const { return x == kRoot ? 1.0 : sampler_->weight_value(weight_index_[x]); }
  // Summed from the root each call, O(generation(x)).
  double potential(VertexId x) const;
  std::uint64_t key(VertexId x) const { return key_[x]; }

  bool is_expanded(VertexId x) const { return child_first_[x] != kUnexpanded; }
  // Children of an expanded vertex; empty for unexpanded ones.
  ChildRange children(VertexId x) const {
    return is_expanded(x) ? ChildRange{child_first_[x], child_count_[x]} : ChildRange{};
  }

  // Draws the children of x. Throws UsageError if x is unknown or already expanded.
  ChildRange expand(VertexId x);
  // Same as expand(x) with the caller supplying generation(x), which skips the walk to the root.
  ChildRange expand_at(VertexId x, std::uint32_t generation);
  // Expands x if needed and returns its children.
  ChildRange ensure_expanded(VertexId x) { return is_expanded(x) ? children(x) : expand(x); }

  std::size_t unexpanded_count() const { return unexpanded_; }

  // Number of vertices created so far at generation k.
  // Bytes held by the per-vertex arrays.
  std::size_t memory_bytes() const;

  std::uint64_t created(std::uint32_t k) const { return k < created_.size() ? created_[k] : 0; }
  // True once every generation-(k-1) vertex exists and is expanded; created(k) = Z_k from then on.
  bool finalized(std::uint32_t k) const;
  // Largest generation that is finalized and non-empty, or the first empty finalized one.
  std::uint32_t finalized_depth() const { return finalized_depth_; }

  // Throws std::logic_error naming the first broken invariant.
  void check_invariants() const;

  const ChildSampler& sampler() const { return *sampler_; }

 private:
  static constexpr VertexId kUnexpanded = std::numeric_limits<VertexId>::max();

  void push_vertex(VertexId parent, std::uint16_t weight_index, std::uint64_t key);
  void advance_finalized();

  std::shared_ptr<const ChildSampler> sampler_;
  std::uint64_t tree_seed_;

  // Weights are stored as indices into the sampler's support; the root holds kNoWeight.
  static constexpr std::uint16_t kNoWeight = 0xFFFF;

  ChunkedArray<VertexId> parent_;
  ChunkedArray<std::uint16_t> weight_index_;
  ChunkedArray<std::uint64_t> key_;
  ChunkedArray<VertexId> child_first_;
  ChunkedArray<std::uint16_t> child_count_;

  std::vector<std::uint64_t> created_;
  std::vector<std::uint64_t> expanded_;
  std::uint32_t finalized_depth_ = 0;
  std::size_t unexpanded_ = 0;

  std::vector<std::uint16_t> scratch_;
};

// V(x_1), ..., V(x_n) along ]root, x]; empty for the root.
std::vector<double> potential_along_path(const TreeArena& arena, VertexId x);

// Vertices of ]root, x] in root-to-x order.
std::vector<VertexId> path_from_root(const TreeArena& arena, VertexId x);

// True iff no unexpanded vertex remains, i.e. the whole (finite) tree is known.
bool detect_extinction(const TreeArena& arena);

}  // namespace rwre
