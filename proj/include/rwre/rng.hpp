#pragma once

#include <cstdint>

namespace rwre {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed derivation used by every replica-level consumer.
///
///   h(a, b, c) = mix64(mix64(mix64(a + G) + b + G) + c + G),  G = 0x9e3779b97f4a7c15
///
/// Reference values are pinned in tests/test_rng.cpp.
constexpr std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return mix64(mix64(mix64(a + kGoldenGamma) + b + kGoldenGamma) + c + kGoldenGamma);
}

// Tag used in place of the attempt counter when deriving walk seeds ("walk" in ASCII, high bit set).
inline constexpr std::uint64_t kWalkStreamTag = 0x8000'0000'7761'6c6bULL;

/// Counter-based stream: the k-th draw is mix64(key + k * G). Any (key, k) pair can be
/// evaluated independently, which is what makes lazy tree expansion order-free.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGoldenGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

constexpr std::uint64_t root_key(std::uint64_t tree_seed) noexcept {
  return mix64(tree_seed + kGoldenGamma);
}

// Structural (Ulam-Harris) key of the i-th child, i counted from 0.
constexpr std::uint64_t child_key(std::uint64_t parent_key, std::uint32_t index) noexcept {
  return mix64(parent_key + (static_cast<std::uint64_t>(index) + 1) * 0xd1b54a32d192ed03ULL);
}

}  // namespace rwre
