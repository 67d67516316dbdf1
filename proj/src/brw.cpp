#include "rwre/brw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/kernels.hpp"
#include "rwre/parallel.hpp"
#include "rwre/regime.hpp"
#include "rwre/rng.hpp"

namespace rwre {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAtomMergeTolerance = 1e-12;
constexpr std::size_t kMaxAtoms = 1'000'000;

std::uint64_t replica_tree_seed(std::uint64_t seed, std::size_t r) { return derive_seed(seed, r, 0); }

}  // namespace

double threshold_slack(double c) { return 1e-9 * std::max(1.0, std::abs(c)); }

TiltedStepLaw tilted_step_law(const EnvironmentSpec& spec) {
  require_valid(spec);
  const double scale = spec.offspring.mean() * std::exp(-psi(spec, 1.0));
  TiltedStepLaw law;
  for (const auto& [a, p] : spec.weights.support) {
    if (p <= 0.0) continue;
    law.support.emplace_back(-std::log(a), scale * a * p);
  }
  return law;
}

std::vector<std::pair<double, double>> sn_distribution(const EnvironmentSpec& spec, int n) {
  if (n < 1 || n > 30) throw UsageError("sn_distribution: n must be in [1, 30]");
  auto merge = [](std::vector<std::pair<double, double>>& atoms) {
    std::sort(atoms.begin(), atoms.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& [v, p] : atoms) {
      if (!out.empty() && v - out.back().first < kAtomMergeTolerance * std::max(1.0, std::abs(v))) {
        out.back().second += p;
      } else {
        out.emplace_back(v, p);
      }
    }
    atoms = std::move(out);
  };
  const TiltedStepLaw step = tilted_step_law(spec);
  std::vector<std::pair<double, double>> dist = step.support;
  merge(dist);
  for (int k = 1; k < n; ++k) {
    if (dist.size() * step.support.size() > 4 * kMaxAtoms) {
      throw ResourceError("sn_distribution: support explosion at n=" + std::to_string(k + 1));
    }
    std::vector<std::pair<double, double>> next;
    next.reserve(dist.size() * step.support.size());
    for (const auto& [v, p] : dist) {
      for (const auto& [s, q] : step.support) next.emplace_back(v + s, p * q);
    }
    merge(next);
    if (next.size() > kMaxAtoms) throw ResourceError("sn_distribution: more than 1e6 atoms at n=" + std::to_string(k + 1));
    dist = std::move(next);
  }
  return dist;
}

double sn_tail_exact(const EnvironmentSpec& spec, int n, double c) {
  if (c == kNegInf) return 1.0;
  const double cut = c - threshold_slack(c);
  double tail = 0.0;
  for (const auto& [v, p] : sn_distribution(spec, n)) {
    if (v >= cut) tail += p;
  }
  return tail;
}

double sn_median(const EnvironmentSpec& spec, int n) {
  double acc = 0.0;
  const auto dist = sn_distribution(spec, n);
  for (const auto& [v, p] : dist) {
    acc += p;
    if (acc >= 0.5) return v;
  }
  return dist.back().first;
}

LevelSampler::LevelSampler(std::shared_ptr<const ChildSampler> sampler, std::uint64_t tree_seed)
    : sampler_(std::move(sampler)), key_{root_key(tree_seed)}, potential_{0.0}, running_max_{kNegInf} {}

void LevelSampler::advance() {
  std::vector<std::uint64_t> keys;
  std::vector<double> pot;
  std::vector<double> bar;
  const std::size_t guess = potential_.size() * static_cast<std::size_t>(std::max(1, sampler_->max_children()));
  keys.reserve(guess);
  pot.reserve(guess);
  bar.reserve(guess);
  for (std::size_t i = 0; i < key_.size(); ++i) {
    scratch_w_.clear();
    scratch_nl_.clear();
    const std::uint32_t n = sampler_->draw(key_[i], scratch_w_, scratch_nl_);
    for (std::uint32_t j = 0; j < n; ++j) {
      const double v = potential_[i] + scratch_nl_[j];
      keys.push_back(child_key(key_[i], j));
      pot.push_back(v);
      bar.push_back(std::max(running_max_[i], v));
    }
  }
  key_ = std::move(keys);
  potential_ = std::move(pot);
  running_max_ = std::move(bar);
  total_ += potential_.size();
  ++level_;
}

ManyToOneReport verify_many_to_one(const EnvironmentSpec& spec, int n, double c, std::size_t replicas,
                                   std::uint64_t seed, unsigned threads) {
  if (n < 1 || n > 12) throw UsageError("verify_many_to_one: n must be in [1, 12]");
  if (replicas < 1000) throw UsageError("verify_many_to_one: replicas must be >= 1000");
  const auto sampler = std::make_shared<const ChildSampler>(spec);
  const double shift = psi(spec, 1.0) * n;
  const double cut = c == kNegInf ? kNegInf : c - threshold_slack(c);

  std::vector<double> values(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    LevelSampler tree(sampler, replica_tree_seed(seed, r));
    for (int k = 0; k < n; ++k) tree.advance();
    values[r] = kernels::tilted_sum_above(tree.potentials(), shift, cut);
  });

  const MeanEstimate est = summarize(values);
  ManyToOneReport rep;
  rep.n = n;
  rep.c = c;
  rep.lhs_estimate = est.mean;
  rep.lhs_stderr = est.std_error;
  rep.rhs_exact = sn_tail_exact(spec, n, c);
  const double diff = rep.lhs_estimate - rep.rhs_exact;
  if (rep.lhs_stderr > 0.0) {
    rep.z_score = diff / rep.lhs_stderr;
  } else {
    // Degenerate (deterministic) environments: exact agreement or an infinite z.
    rep.z_score = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return rep;
}

MeanEstimate martingale_mean(const EnvironmentSpec& spec, Martingale which, int n, std::size_t replicas,
                             std::uint64_t seed, unsigned threads) {
  if (n < 0) throw UsageError("martingale_mean: n must be >= 0");
  if (replicas < 1) throw UsageError("martingale_mean: replicas must be >= 1");
  if (which == Martingale::kM && !(std::abs(psi(spec, 1.0)) <= 1e-9)) {
    throw UsageError("martingale_mean: M requires psi(1) = 0");
  }
  const auto sampler = std::make_shared<const ChildSampler>(spec);
  const double w_scale = 1.0 / std::pow(spec.offspring.mean(), n);
  std::vector<double> values(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    LevelSampler tree(sampler, replica_tree_seed(seed, r));
    for (int k = 0; k < n; ++k) tree.advance();
    values[r] = which == Martingale::kW ? static_cast<double>(tree.size()) * w_scale
                                        : kernels::tilted_sum_above(tree.potentials(), 0.0, kNegInf);
  });
  return summarize(values);
}

std::vector<MaxPotentialAggregate> max_potential_profile(const EnvironmentSpec& spec,
                                                         std::span<const std::uint32_t> levels,
                                                         std::size_t replicas, std::uint64_t seed,
                                                         unsigned threads, std::size_t vertex_cap) {
  std::vector<std::uint32_t> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty() || sorted.front() < 1 || sorted.back() > kMaxProfileLevel) {
    throw UsageError("max_potential_profile: levels must lie in [1, 24]");
  }
  const std::uint32_t deepest = sorted.back();
  const auto sampler = std::make_shared<const ChildSampler>(spec);

  struct Sample {
    bool survived = false;
    std::vector<double> max_v;
    std::vector<double> max_bar_v;
  };
  std::vector<Sample> samples(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    LevelSampler tree(sampler, replica_tree_seed(seed, r));
    Sample& s = samples[r];
    std::size_t next = 0;
    while (tree.level() < deepest) {
      tree.advance();
      if (tree.total_vertices() > vertex_cap) {
        throw ResourceError("max_potential_profile: vertex cap exceeded at generation " +
                            std::to_string(tree.level()));
      }
      if (tree.size() == 0) return;
      if (tree.level() == sorted[next]) {
        s.max_v.push_back(kernels::max_value(tree.potentials()) / tree.level());
        s.max_bar_v.push_back(kernels::max_value(tree.running_max()) / tree.level());
        ++next;
      }
    }
    s.survived = true;
  });

  std::vector<MaxPotentialAggregate> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::vector<double> v;
    std::vector<double> b;
    for (const Sample& s : samples) {
      if (!s.survived) continue;
      v.push_back(s.max_v[i]);
      b.push_back(s.max_bar_v[i]);
    }
    MaxPotentialAggregate agg;
    agg.level = sorted[i];
    const MeanEstimate ev = summarize(v);
    const MeanEstimate eb = summarize(b);
    agg.count = ev.count;
    agg.mean_max_v = ev.mean;
    agg.stderr_max_v = ev.std_error;
    agg.mean_max_bar_v = eb.mean;
    agg.stderr_max_bar_v = eb.std_error;
    agg.min_max_v = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    agg.max_max_bar_v = b.empty() ? 0.0 : *std::max_element(b.begin(), b.end());
    out.push_back(agg);
  }
  return out;
}

}  // namespace rwre
