#pragma once

// Environment laws: offspring count N and i.i.d. edge weight A, independent of N.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rwre {

inline constexpr double kProbabilitySumTolerance = 1e-12;

struct OffspringLaw {
  std::vector<std::pair<int, double>> support;  // (count, probability)

  int max_count() const;  // N0
  double mean() const;    // E[N]
};

struct WeightLaw {
  std::vector<std::pair<double, double>> support;  // (value, probability)

  double min_value() const;
  double max_value() const;
  double mass_at_min() const;  // total probability of values equal to min_value()
  double mean() const;
  // min(a_min, 1/a_max): the tightest ellipticity constant for this law.
  double epsilon0() const;
};

struct EnvironmentSpec {
  OffspringLaw offspring;
  WeightLaw weights;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationReport validate_spec(const EnvironmentSpec& spec);

// Throws ConfigError listing every violation.
void require_valid(const EnvironmentSpec& spec);

/// Inverse-CDF tables for drawing children. Built once per spec and shared
/// read-only between replicas.
class ChildSampler {
 public:
  explicit ChildSampler(const EnvironmentSpec& spec);

  // Draws (N, weights) for the vertex with the given structural key. Appends the
  // weights and their -log values; returns N.
  std::uint32_t draw(std::uint64_t vertex_key, std::vector<double>& weights, std::vector<double>& neg_log_weights) const;

  // Same draw as above, reporting each weight as an index into the weight support.
  std::uint32_t draw_indices(std::uint64_t vertex_key, std::vector<std::uint16_t>& weight_indices) const;

  int max_children() const { return max_children_; }
  double weight_value(std::size_t j) const { return weight_values_[j]; }
  double weight_neg_log(std::size_t j) const { return weight_neg_logs_[j]; }

 private:
  std::vector<double> count_cdf_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> weight_cdf_;
  std::vector<double> weight_values_;
  std::vector<double> weight_neg_logs_;
  int max_children_ = 0;
};

}  // namespace rwre
