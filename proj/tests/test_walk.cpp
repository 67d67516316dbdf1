#include <doctest.h>

#include <cmath>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"
#include "support.hpp"

using namespace rwre;
using namespace rwre::testing;

namespace {

// R by scanning the arena generation by generation.
std::uint32_t scan_largest_full_generation(const Walker& w) {
  const TreeArena& arena = w.arena();
  const auto& obs = w.observables();
  std::uint32_t r = 0;
  for (std::uint32_t k = 1;; ++k) {
    if (!arena.finalized(k) || arena.created(k) == 0) return r;
    for (VertexId x = 0; x < arena.size(); ++x)
      if (arena.generation(x) == k && obs.local_time(x) == 0) return r;
    r = k;
  }
}

}  // namespace

TEST_CASE("transition distribution examples") {
  TreeArena arena(binary(0.5), 3);
  const auto root = transition_distribution(arena, kRoot);
  REQUIRE(root.size() == 3);
  CHECK(root[0].probability == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(root[1].probability == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(root[2].target == kVirtualParent);
  CHECK(root[2].probability == doctest::Approx(0.5).epsilon(1e-15));

  const auto vp = transition_distribution(arena, kVirtualParent);
  REQUIRE(vp.size() == 1);
  CHECK(vp[0].target == kRoot);
  CHECK(vp[0].probability == 1.0);

  const auto spec = offspring_0_3();
  for (std::uint64_t s = 0;; ++s) {
    TreeArena a(spec, s);
    const auto kids = a.expand(kRoot);
    bool done = false;
    for (VertexId c : kids.ids()) {
      if (a.expand(c).empty()) {
        const auto t = transition_distribution(a, c);
        REQUIRE(t.size() == 1);
        CHECK(t[0].target == kRoot);
        CHECK(t[0].probability == 1.0);
        done = true;
        break;
      }
    }
    if (done) break;
  }

  for (std::uint64_t s = 0; s < 20; ++s) {
    TreeArena a(kappa_two(), s);
    for (VertexId x = 0; x < 7; ++x) {
      const auto t = transition_distribution(a, x);
      double sum = 0;
      for (const auto& tr : t) {
        CHECK(tr.probability > 0);
        sum += tr.probability;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("first step frequencies from the root") {
  const auto spec = kappa_two();
  constexpr int kWalks = 100000;
  const auto sampler = std::make_shared<const ChildSampler>(spec);
  TreeArena ref(sampler, 11);
  const auto expected = transition_distribution(ref, kRoot);
  std::vector<int> hits(3, 0);
  for (int i = 0; i < kWalks; ++i) {
    Walker w(sampler, 11, derive_seed(1, i, 0));
    w.step();
    const VertexId p = w.position();
    hits[p == kVirtualParent ? 2 : p - 1]++;
  }
  for (int j = 0; j < 3; ++j) {
    const double p = expected[j].probability;
    CHECK(std::abs(hits[j] / double(kWalks) - p) <= 4 * std::sqrt(p * (1 - p) / kWalks));
  }
}

TEST_CASE("empty walk") {
  const auto r = run(binary(0.5), 1, 2, StopRule::steps(0), {});
  REQUIRE(r.snapshots.size() == 1);
  const Snapshot& s = r.snapshots[0];
  CHECK(s.steps == 0);
  CHECK(s.largest_full_generation == 0);
  CHECK(s.max_generation == 0);
  CHECK(s.root_local_time == 0);
}

TEST_CASE("expected hitting time of generation 1 on the binary half tree") {
  const auto spec = binary(0.5);
  const auto sampler = std::make_shared<const ChildSampler>(spec);
  std::vector<double> steps;
  steps.reserve(100000);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const auto r = run(sampler, 5, derive_seed(9, i, kWalkStreamTag), StopRule::hit_generation(1), {});
    REQUIRE(r.snapshots.back().max_generation == 1);
    steps.push_back(static_cast<double>(r.snapshots.back().steps));
  }
  const MeanEstimate e = summarize(steps);
  CHECK(std::abs(e.mean - 3.0) <= 3 * e.std_error);
}

TEST_CASE("runs are deterministic") {
  const std::vector<std::uint64_t> cps{10, 100, 1000, 5000};
  const auto a = run(kappa_two(), 42, 43, StopRule::steps(5000), cps);
  const auto b = run(kappa_two(), 42, 43, StopRule::steps(5000), cps);
  REQUIRE(a.snapshots.size() == 4);
  CHECK(a.snapshots == b.snapshots);
  CHECK(a.final_state.local_times == b.final_state.local_times);
  const auto c = run(kappa_two(), 42, 44, StopRule::steps(5000), cps);
  CHECK_FALSE(a.final_state.local_times == c.final_state.local_times);
}

TEST_CASE("walk invariants along a trajectory") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Walker w(mixed_chi_neg(), seed, seed + 100);
    std::uint32_t max_gen = 0;
    for (int k = 0; k < 20000; ++k) {
      const VertexId before = w.position();
      w.step();
      const VertexId after = w.position();
      const TreeArena& arena = w.arena();
      // Nearest-neighbour moves only.
      if (before == kVirtualParent) {
        REQUIRE(after == kRoot);
      } else if (after == kVirtualParent) {
        REQUIRE(before == kRoot);
      } else {
        REQUIRE((arena.parent(after) == before || arena.parent(before) == after));
      }
      if (after != kVirtualParent) max_gen = std::max(max_gen, arena.generation(after));
      if (k % 997 == 0) {
        const auto& obs = w.observables();
        REQUIRE(obs.largest_full_generation == scan_largest_full_generation(w));
        REQUIRE(obs.largest_full_generation <= obs.max_generation);
      }
    }
    const auto& obs = w.observables();
    std::uint64_t total = obs.virtual_parent_local_time;
    for (auto l : obs.local_times) total += l;
    CHECK(total == obs.steps);
    CHECK(obs.root_local_time == obs.local_time(kRoot));
    CHECK(obs.root_returns == obs.root_local_time);
    CHECK(obs.max_generation == max_gen);
    CHECK(obs.largest_full_generation == scan_largest_full_generation(w));
    w.arena().check_invariants();
  }
}

TEST_CASE("largest full generation on a short trajectory") {
  Walker w(binary(0.5), 3, 4);
  for (int k = 0; k < 20; ++k) {
    w.step();
    CHECK(w.observables().largest_full_generation == scan_largest_full_generation(w));
  }
}

TEST_CASE("update_largest_full_generation examples") {
  TreeArena arena(binary(0.5), 1);
  arena.expand(kRoot);
  arena.expand(1);
  arena.expand(2);
  WalkObservables obs;
  obs.visited_per_generation = {1, 0, 0};
  CHECK(update_largest_full_generation(obs, arena) == 0);
  obs.visited_per_generation = {1, 2, 3};
  CHECK(update_largest_full_generation(obs, arena) == 1);
  obs.visited_per_generation = {1, 2, 4};
  CHECK(update_largest_full_generation(obs, arena) == 2);
}

TEST_CASE("root returns stop rule") {
  const auto r = run(binary(0.5), 8, 9, StopRule::root_returns(50), std::vector<std::uint64_t>{10, 20, 50});
  REQUIRE(r.snapshots.size() == 3);
  CHECK(r.snapshots[0].root_returns == 10);
  CHECK(r.snapshots[2].root_returns == 50);
  CHECK(r.final_state.position == kRoot);
}

TEST_CASE("step cap truncates") {
  const auto r = run(binary(0.5), 8, 9, StopRule::root_returns(1000000), std::vector<std::uint64_t>{1, 1000000},
                     RunOptions{5000});
  REQUIRE(r.snapshots.size() == 2);
  CHECK_FALSE(r.snapshots.front().truncated);
  CHECK(r.snapshots.front().root_returns == 1);
  CHECK(r.snapshots.back().truncated);
  CHECK(r.snapshots.back().steps == 5000);
}

TEST_CASE("extinct trees end the run") {
  const auto spec = offspring_0_3();
  std::uint64_t seed = 0;
  while (!TreeArena(spec, seed).expand(kRoot).empty()) ++seed;
  const auto r = run(spec, seed, 1, StopRule::steps(100), {});
  CHECK(r.snapshots.back().extinct);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(run(binary(0.5), 1, 1, StopRule::steps(10), std::vector<std::uint64_t>{5, 3}), UsageError);
  CHECK_THROWS_AS(run(binary(0.5), 1, 1, StopRule::steps(10), std::vector<std::uint64_t>{20}), UsageError);
  CHECK_THROWS_AS(run(binary(0.5), 1, 1, StopRule::root_returns(0), {}), UsageError);
}
