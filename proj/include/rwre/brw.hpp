#pragma once

// Branching-random-walk checks on the potential V: the many-to-one identity
// with threshold functionals, the W and M martingales, and max-potential profiles.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// One atom per weight-support point: P(S_1 = -log a) = E[N] e^{-psi(1)} a p.
struct TiltedStepLaw {
  std::vector<std::pair<double, double>> support;  // (value, probability)
};

TiltedStepLaw tilted_step_law(const EnvironmentSpec& spec);

// Exact law of S_n by n-fold convolution, atoms closer than 1e-12 merged, sorted by value.
// Throws ResourceError past 1e6 atoms.
std::vector<std::pair<double, double>> sn_distribution(const EnvironmentSpec& spec, int n);

// P(S_n >= c); n in [1, 30].
double sn_tail_exact(const EnvironmentSpec& spec, int n, double c);

// Smallest atom v with P(S_n <= v) >= 1/2.
double sn_median(const EnvironmentSpec& spec, int n);

// Comparisons V >= c use this slack so that sums of the same atoms in a different
// order still land on the same side of an atom-valued threshold.
double threshold_slack(double c);

/// Breadth-first generation-by-generation sampler. Vertex order and per-vertex
/// draws are the same as a TreeArena expanded breadth-first from the same seed.
class LevelSampler {
 public:
  LevelSampler(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed);

  std::uint32_t level() const { return level_; }
  std::size_t size() const { return potential_.size(); }
  std::size_t total_vertices() const { return total_; }
  std::span<const double> potentials() const { return potential_; }
  // max of V over ]root, z] per vertex; -inf at the root.
  std::span<const double> running_max() const { return running_max_; }

  void advance();

 private:
  std::shared_ptr<const ChildSampler> sampler_;
  std::uint32_t level_ = 0;
  std::size_t total_ = 1;
  std::vector<std::uint64_t> key_;
  std::vector<double> potential_;
  std::vector<double> running_max_;
  std::vector<double> scratch_w_;
  std::vector<double> scratch_nl_;
};

struct ManyToOneReport {
  int n = 0;
  double c = 0;
  double lhs_estimate = 0;
  double lhs_stderr = 0;
  double rhs_exact = 0;
  double z_score = 0;
};

// Requires n <= 12 and replicas >= 1000.
ManyToOneReport verify_many_to_one(const EnvironmentSpec& spec, int n, double c, std::size_t replicas,
                                   std::uint64_t seed, unsigned threads = 1);

enum class Martingale { kW, kM };

// W_n = Z_n / E[N]^n; M_n = sum_{|x|=n} prod A = sum e^{-V(x)} (needs |psi(1)| <= 1e-9).
MeanEstimate martingale_mean(const EnvironmentSpec& spec, Martingale which, int n, std::size_t replicas,
                             std::uint64_t seed, unsigned threads = 1);

struct MaxPotentialAggregate {
  std::uint32_t level = 0;
  std::size_t count = 0;  // surviving samples
  double mean_max_v = 0;  // mean of max_{|z|=l} V(z) / l
  double stderr_max_v = 0;
  double min_max_v = 0;
  double mean_max_bar_v = 0;  // mean of max_{|z|=l} Vbar(z) / l
  double stderr_max_bar_v = 0;
  double max_max_bar_v = 0;
};

inline constexpr std::uint32_t kMaxProfileLevel = 24;

// Per-level aggregates over trees with Z_L > 0, L = max(levels). Throws
// ResourceError when one tree exceeds vertex_cap vertices.
std::vector<MaxPotentialAggregate> max_potential_profile(const EnvironmentSpec& spec,
                                                         std::span<const std::uint32_t> levels,
                                                         std::size_t replicas, std::uint64_t seed,
                                                         unsigned threads = 1,
                                                         std::size_t vertex_cap = 20'000'000);

}  // namespace rwre
