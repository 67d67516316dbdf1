#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

int OffspringLaw::max_count() const {
  int n0 = 0;
  for (const auto& [count, p] : support) n0 = std::max(n0, count);
  return n0;
}

double OffspringLaw::mean() const {
  double m = 0.0;
  for (const auto& [count, p] : support) m += count * p;
  return m;
}

double WeightLaw::min_value() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& [a, p] : support) v = std::min(v, a);
  return v;
}

double WeightLaw::max_value() const {
  double v = 0.0;
  for (const auto& [a, p] : support) v = std::max(v, a);
  return v;
}

double WeightLaw::mass_at_min() const {
  const double amin = min_value();
  double mass = 0.0;
  for (const auto& [a, p] : support) {
    if (a == amin) mass += p;
  }
  return mass;
}

double WeightLaw::mean() const {
  double m = 0.0;
  for (const auto& [a, p] : support) m += a * p;
  return m;
}

double WeightLaw::epsilon0() const { return std::min(min_value(), 1.0 / max_value()); }

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

ValidationReport validate_spec(const EnvironmentSpec& spec) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };

  const auto& off = spec.offspring.support;
  if (off.empty()) fail("offspring support is empty");
  double off_sum = 0.0;
  bool off_probs_ok = true;
  for (const auto& [count, p] : off) {
    if (count < 0) fail("offspring count " + std::to_string(count) + " is negative");
    if (!(p >= 0.0 && p <= 1.0)) {
      fail("offspring probability " + fmt(p) + " outside [0,1]");
      off_probs_ok = false;
    }
    off_sum += p;
  }
  if (!off.empty() && std::abs(off_sum - 1.0) > kProbabilitySumTolerance) {
    fail("offspring probabilities sum to " + fmt(off_sum));
    off_probs_ok = false;
  }

  const auto& w = spec.weights.support;
  if (w.empty()) fail("weight support is empty");
  double w_sum = 0.0;
  for (const auto& [a, p] : w) {
    if (!(std::isfinite(a) && a > 0.0)) fail("weight value " + fmt(a) + " is not strictly positive and finite");
    if (!(p >= 0.0 && p <= 1.0)) fail("weight probability " + fmt(p) + " outside [0,1]");
    w_sum += p;
  }
  if (!w.empty() && std::abs(w_sum - 1.0) > kProbabilitySumTolerance) {
    fail("weight probabilities sum to " + fmt(w_sum));
  }

  if (!off.empty() && off_probs_ok) {
    const double mean = spec.offspring.mean();
    if (!(std::log(mean) > 0.0)) fail("not super-critical: E[N]=" + fmt(mean));
  }
  return report;
}

void require_valid(const EnvironmentSpec& spec) {
  const ValidationReport report = validate_spec(spec);
  if (report.ok) return;
  std::string msg = "invalid environment:";
  for (const auto& v : report.violations) msg += " " + v + ";";
  throw ConfigError(msg);
}

namespace {
constexpr int kMaxCompactValue = 65535;
}  // namespace

ChildSampler::ChildSampler(const EnvironmentSpec& spec) {
  require_valid(spec);
  double acc = 0.0;
  for (const auto& [count, p] : spec.offspring.support) {
    if (p <= 0.0) continue;
    acc += p;
    count_cdf_.push_back(acc);
    counts_.push_back(static_cast<std::uint32_t>(count));
    max_children_ = std::max(max_children_, count);
  }
  count_cdf_.back() = 1.0;
  acc = 0.0;
  for (const auto& [a, p] : spec.weights.support) {
    if (p <= 0.0) continue;
    acc += p;
    weight_cdf_.push_back(acc);
    weight_values_.push_back(a);
    weight_neg_logs_.push_back(-std::log(a));
  }
  weight_cdf_.back() = 1.0;
  // The arena stores child counts and weight indices in 16 bits.
  if (max_children_ > kMaxCompactValue) throw ConfigError("offspring counts above 65535 are not supported");
  if (weight_values_.size() > static_cast<std::size_t>(kMaxCompactValue)) throw ConfigError("weight laws with more than 65535 atoms are not supported");
}

std::uint32_t ChildSampler::draw_indices(std::uint64_t vertex_key, std::vector<std::uint16_t>& weight_indices) const {
  CounterStream stream(vertex_key);
  auto pick = [](const std::vector<double>& cdf, double u) {
    std::size_t i = 0;
    while (i + 1 < cdf.size() && u >= cdf[i]) ++i;
    return i;
  };
  const std::uint32_t n = counts_[pick(count_cdf_, stream.uniform())];
  for (std::uint32_t i = 0; i < n; ++i) {
    weight_indices.push_back(static_cast<std::uint16_t>(pick(weight_cdf_, stream.uniform())));
  }
  return n;
}

std::uint32_t ChildSampler::draw(std::uint64_t vertex_key, std::vector<double>& weights,
                                 std::vector<double>& neg_log_weights) const {
  std::vector<std::uint16_t> idx;
  const std::uint32_t n = draw_indices(vertex_key, idx);
  for (std::uint16_t j : idx) {
    weights.push_back(weight_values_[j]);
    neg_log_weights.push_back(weight_neg_logs_[j]);
  }
  return n;
}

}  // namespace rwre
