#include "rwre/harness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/json_out.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

std::vector<std::uint64_t> dyadic_grid(unsigned j0, unsigned j1) {
  if (j0 > j1 || j1 > 62) throw UsageError("dyadic grid needs J0 <= J1 <= 62");
  std::vector<std::uint64_t> grid;
  for (unsigned j = j0; j <= j1; ++j) grid.push_back(std::uint64_t{1} << j);
  return grid;
}

std::uint64_t replica_tree_seed(std::uint64_t master_seed, std::size_t replica, std::uint32_t attempt) {
  return derive_seed(master_seed, replica, attempt);
}

std::uint64_t replica_walk_seed(std::uint64_t master_seed, std::size_t replica) {
  return derive_seed(master_seed, replica, kWalkStreamTag);
}

std::string_view to_string(Observable o) {
  switch (o) {
    case Observable::kR: return "R";
    case Observable::kRTilde: return "RTILDE";
    case Observable::kXStar: return "XSTAR";
    case Observable::kLogLRoot: return "LOG_LROOT";
    case Observable::kLRoot: return "LROOT";
  }
  return "?";
}

namespace {

void validate_plan(const ExperimentPlan& plan) {
  require_valid(plan.spec);
  if (plan.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (plan.grid.empty()) throw ConfigError("empty checkpoint grid");
  for (std::size_t i = 0; i < plan.grid.size(); ++i) {
    if (plan.grid[i] == 0) throw ConfigError("grid values must be positive");
    if (i > 0 && plan.grid[i] <= plan.grid[i - 1]) throw ConfigError("grid must be strictly increasing");
  }
  if (plan.stop_value != 0 && plan.stop_value < plan.grid.back())
    throw ConfigError("stop value below the last grid point");
  if (plan.kind == StopKind::kHitGeneration && plan.grid.back() > UINT32_MAX)
    throw ConfigError("generation out of range");
}

std::uint64_t effective_cap(const ExperimentPlan& plan) {
  if (plan.step_cap != 0) return plan.step_cap;
  return plan.kind == StopKind::kRootReturns ? kRootReturnsStepCap : UINT64_MAX;
}

std::vector<Observable> observables_for(StopKind kind) {
  switch (kind) {
    case StopKind::kSteps:
    case StopKind::kHitGeneration:
      return {Observable::kR, Observable::kXStar, Observable::kLRoot, Observable::kLogLRoot};
    case StopKind::kRootReturns:
      return {Observable::kRTilde, Observable::kXStar};
  }
  return {};
}

// Returns false when the replica does not contribute to this observable.
bool observe(const Snapshot& s, Observable o, double& value) {
  switch (o) {
    case Observable::kR:
    case Observable::kRTilde: value = s.largest_full_generation; return true;
    case Observable::kXStar: value = s.max_generation; return true;
    case Observable::kLRoot: value = static_cast<double>(s.root_local_time); return true;
    case Observable::kLogLRoot:
      if (s.root_local_time == 0) return false;
      value = std::log(static_cast<double>(s.root_local_time));
      return true;
  }
  return false;
}

}  // namespace

std::vector<EstimateRecord> aggregate(const ExperimentPlan& plan, std::span<const ReplicaOutcome> outcomes) {
  std::vector<EstimateRecord> records;
  std::vector<double> values;
  for (std::size_t g = 0; g < plan.grid.size(); ++g) {
    for (Observable o : observables_for(plan.kind)) {
      values.clear();
      for (const auto& r : outcomes) {
        if (r.extinct || r.grid_points_reached <= g) continue;
        double v = 0;
        if (observe(r.snapshots[g], o, v)) values.push_back(v);
      }
      if (values.empty()) continue;
      const MeanEstimate e = summarize(values);
      records.push_back({plan.grid[g], o, e.mean, e.std_error, e.count});
    }
  }
  return records;
}

PlanResult run_plan(const ExperimentPlan& plan) {
  validate_plan(plan);
  const auto sampler = std::make_shared<const ChildSampler>(plan.spec);
  const std::uint64_t stop_value = plan.stop_value != 0 ? plan.stop_value : plan.grid.back();
  const StopRule stop{plan.kind, stop_value};
  RunOptions options;
  options.step_cap = effective_cap(plan);

  PlanResult result;
  result.replicas.resize(plan.replicas);
  parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
    ReplicaOutcome& out = result.replicas[r];
    out.replica = r;
    out.walk_seed = replica_walk_seed(plan.master_seed, r);
    const std::uint32_t attempts = plan.max_resamples_per_replica + 1;
    for (std::uint32_t attempt = 0; attempt < attempts; ++attempt) {
      out.tree_seed = replica_tree_seed(plan.master_seed, r, attempt);
      RunResult run_result = run(sampler, out.tree_seed, out.walk_seed, stop, plan.grid, options);
      const Snapshot& last = run_result.snapshots.back();
      out.snapshots = std::move(run_result.snapshots);
      if (last.extinct) {
        out.extinct_tree_seeds.push_back(out.tree_seed);
        continue;
      }
      out.extinct = false;
      out.truncated = last.truncated;
      std::size_t reached = 0;
      while (reached < out.snapshots.size() && reached < plan.grid.size() && !out.snapshots[reached].truncated)
        ++reached;
      out.grid_points_reached = reached;
      return;
    }
    out.extinct = true;
    out.grid_points_reached = 0;
  });

  for (const auto& r : result.replicas) {
    result.extinct_resamples += r.extinct_tree_seeds.size();
    if (r.extinct) ++result.failed_replicas;
    if (r.truncated) ++result.truncated_replicas;
  }
  if (result.failed_replicas == plan.replicas)
    throw ConfigError("every replica went extinct after " + std::to_string(plan.max_resamples_per_replica) +
                      " resamples; is the environment super-critical?");
  result.records = aggregate(plan, result.replicas);
  return result;
}

void write_jsonl(const PlanResult& result, std::ostream& out) {
  for (const auto& r : result.replicas) {
    std::string resampled = "[";
    for (std::size_t i = 0; i < r.extinct_tree_seeds.size(); ++i) {
      if (i) resampled += ',';
      resampled += std::to_string(r.extinct_tree_seeds[i]);
    }
    resampled += ']';
    for (const Snapshot& s : r.snapshots) {
      JsonObject o;
      o.integer("replica", static_cast<std::int64_t>(r.replica))
          .integer("steps", static_cast<std::int64_t>(s.steps))
          .integer("returns", static_cast<std::int64_t>(s.root_returns))
          .integer("R", s.largest_full_generation)
          .integer("Xstar", s.max_generation)
          .integer("L_root", static_cast<std::int64_t>(s.root_local_time))
          .boolean("extinct", s.extinct)
          .boolean("truncated", s.truncated)
          .string("tree_seed", std::to_string(r.tree_seed))
          .string("walk_seed", std::to_string(r.walk_seed))
          .raw("extinct_tree_seeds", resampled);
      out << o.str() << '\n';
    }
  }
}

void write_summary_csv(std::span<const EstimateRecord> records, std::ostream& out) {
  out << "n,observable,mean,stderr,count\n";
  for (const auto& r : records)
    out << r.n << ',' << to_string(r.observable) << ',' << format_real(r.mean) << ',' << format_real(r.std_error) << ','
        << r.replica_count << '\n';
}

void write_plot_data(std::span<const EstimateRecord> records, Observable observable, std::ostream& out) {
  for (const auto& r : records)
    if (r.observable == observable)
      out << format_real(std::log(static_cast<double>(r.n))) << ' ' << format_real(r.mean) << '\n';
}

LimitEstimate estimate_limit(std::span<const EstimateRecord> records, Observable observable, LimitMode mode) {
  std::vector<EstimateRecord> rs;
  for (const auto& r : records)
    if (r.observable == observable) rs.push_back(r);
  std::sort(rs.begin(), rs.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  if (rs.size() < 3)
    throw UsageError("estimate_limit needs at least 3 grid points, got " + std::to_string(rs.size()));

  if (mode == LimitMode::kRatio) {
    const auto& last = rs.back();
    const double l = std::log(static_cast<double>(last.n));
    return {last.mean / l, last.std_error / l};
  }

  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> se;
  for (const auto& r : rs) {
    x.push_back(std::log(static_cast<double>(r.n)));
    if (mode == LimitMode::kSlope) {
      y.push_back(r.mean);
      se.push_back(r.std_error);
    } else {
      if (!(r.mean > 0)) throw NumericalError("EXPONENT mode needs positive means");
      y.push_back(std::log(r.mean));
      se.push_back(r.std_error / r.mean);
    }
  }
  const LineFit fit = least_squares(x, y);
  // Independent grid points: var(slope) = sum w_i^2 se_i^2 with w_i = (x_i - xbar) / Sxx.
  double mx = 0;
  for (double v : x) mx += v;
  mx /= static_cast<double>(x.size());
  double sxx = 0;
  for (double v : x) sxx += (v - mx) * (v - mx);
  double var = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (x[i] - mx) / sxx;
    var += w * w * se[i] * se[i];
  }
  return {fit.slope, std::sqrt(var)};
}

}  // namespace rwre
