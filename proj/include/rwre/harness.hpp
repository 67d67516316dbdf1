#pragma once

// Replica-parallel experiments over the walk and estimators for the log n limits.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/walk.hpp"

namespace rwre {

inline constexpr std::uint64_t kRootReturnsStepCap = std::uint64_t{1} << 28;

struct ExperimentPlan {
  EnvironmentSpec spec;
  StopKind kind = StopKind::kSteps;
  std::vector<std::uint64_t> grid;  // checkpoints, strictly increasing
  std::uint64_t stop_value = 0;     // 0 means grid.back()
  std::size_t replicas = 1;
  std::uint64_t master_seed = 0;
  std::uint32_t max_resamples_per_replica = 64;
  std::uint64_t step_cap = 0;  // 0 means 2^28 for ROOT_RETURNS and unlimited otherwise
  unsigned threads = 1;
};

std::vector<std::uint64_t> dyadic_grid(unsigned j0, unsigned j1);

std::uint64_t replica_tree_seed(std::uint64_t master_seed, std::size_t replica, std::uint32_t attempt);
std::uint64_t replica_walk_seed(std::uint64_t master_seed, std::size_t replica);

struct ReplicaOutcome {
  std::size_t replica = 0;
  std::uint64_t tree_seed = 0;  // seed of the attempt that was kept
  std::uint64_t walk_seed = 0;
  std::vector<std::uint64_t> extinct_tree_seeds;  // rejected attempts, in order
  std::vector<Snapshot> snapshots;
  std::size_t grid_points_reached = 0;  // snapshots[0..k) correspond to grid[0..k)
  bool extinct = false;                 // every attempt went extinct
  bool truncated = false;
};

enum class Observable { kR, kRTilde, kXStar, kLogLRoot, kLRoot };

std::string_view to_string(Observable o);

struct EstimateRecord {
  std::uint64_t n = 0;
  Observable observable = Observable::kR;
  double mean = 0;
  double std_error = 0;
  std::size_t replica_count = 0;
};

struct PlanResult {
  std::vector<ReplicaOutcome> replicas;
  std::vector<EstimateRecord> records;
  std::size_t extinct_resamples = 0;
  std::size_t failed_replicas = 0;
  std::size_t truncated_replicas = 0;
};

// Throws ConfigError on an invalid plan or when every replica went extinct.
PlanResult run_plan(const ExperimentPlan& plan);

// Reduces replica outcomes (in index order) into per-grid-point records.
std::vector<EstimateRecord> aggregate(const ExperimentPlan& plan, std::span<const ReplicaOutcome> outcomes);

// One JSON object per (replica, snapshot):
// {"replica","steps","returns","R","Xstar","L_root","extinct","truncated"}
void write_jsonl(const PlanResult& result, std::ostream& out);
// Header n,observable,mean,stderr,count.
void write_summary_csv(std::span<const EstimateRecord> records, std::ostream& out);
// Two whitespace-separated columns: log n, mean.
void write_plot_data(std::span<const EstimateRecord> records, Observable observable, std::ostream& out);

enum class LimitMode { kRatio, kSlope, kExponent };

struct LimitEstimate {
  double value = 0;
  double std_error = 0;
};

// RATIO: mean / log n at the largest n. SLOPE: least-squares slope of the mean against
// log n. EXPONENT: least-squares slope of log(mean) against log n. Needs >= 3 grid points.
LimitEstimate estimate_limit(std::span<const EstimateRecord> records, Observable observable, LimitMode mode);

}  // namespace rwre
