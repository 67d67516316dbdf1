#include <doctest.h>

#include <cmath>
#include <random>

#include "rwre/errors.hpp"
#include "rwre/exact.hpp"
#include "support.hpp"

using namespace rwre;
using namespace rwre::testing;

namespace {

std::uint64_t root_dies_seed(const EnvironmentSpec& spec) {
  std::uint64_t s = 0;
  while (!TreeArena(spec, s).expand(kRoot).empty()) ++s;
  return s;
}

VertexId first_at_generation(const FrozenTree& t, std::uint32_t g) {
  for (VertexId x = 0; x < t.vertex_count(); ++x)
    if (t.arena.generation(x) == g) return x;
  return kVirtualParent;
}

VertexId ancestor_at(const TreeArena& a, VertexId x, std::uint32_t g) {
  while (a.generation(x) > g) x = a.parent(x);
  return x;
}

}  // namespace

TEST_CASE("freeze") {
  const auto t = freeze(binary(0.5), 3, 1);
  CHECK(t.vertex_count() == 15);
  CHECK_FALSE(t.extinct);

  const auto spec = offspring_0_3();
  const auto dead = freeze(spec, 4, root_dies_seed(spec));
  CHECK(dead.vertex_count() == 1);
  CHECK(dead.extinct);

  const auto a = freeze(kappa_two(), 6, 99);
  const auto b = freeze(kappa_two(), 6, 99);
  REQUIRE(a.vertex_count() == b.vertex_count());
  for (VertexId x = 0; x < a.vertex_count(); ++x) {
    CHECK(a.arena.weight(x) == b.arena.weight(x));
    CHECK(a.arena.parent(x) == b.arena.parent(x));
  }
  CHECK_THROWS_AS(freeze(binary(0.5), 20, 1, 1000), ResourceError);
  CHECK_THROWS_AS(freeze(binary(0.5), 0, 1), UsageError);
}

TEST_CASE("path hitting probabilities") {
  // Constant potential: symmetric gambler's ruin.
  const auto flat = freeze(binary(1.0), 6, 3);
  for (std::uint32_t len = 1; len <= 6; ++len) {
    const VertexId x = first_at_generation(flat, len);
    CHECK(path_hit_prob_up(flat, kRoot, x) == doctest::Approx(1.0 / len).epsilon(1e-14));
    CHECK(path_hit_prob_down(flat, kRoot, x) == doctest::Approx(1.0 / len).epsilon(1e-14));
  }
  const auto half = freeze(binary(0.5), 2, 3);
  const VertexId x2 = first_at_generation(half, 2);
  CHECK(path_hit_prob_up(half, kRoot, x2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(path_hit_prob_down(half, kRoot, x2) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(path_hit_prob_up(half, x2, kRoot), UsageError);
}

TEST_CASE("path probabilities match the linear-solve oracle") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = freeze(seed % 2 ? kappa_two() : mixed_chi_neg(), 7, seed);
    const TreeArena& a = t.arena;
    for (int k = 0; k < 5; ++k) {
      const VertexId x = static_cast<VertexId>(rng() % t.vertex_count());
      if (a.generation(x) < 2) continue;
      const std::uint32_t g = static_cast<std::uint32_t>(rng() % (a.generation(x) - 1));
      const VertexId anc = ancestor_at(a, x, g);
      const VertexId start_up = ancestor_at(a, x, g + 1);
      const double up = oracle_hit_prob(t, start_up, StateSet::single(t, x), StateSet::single(t, anc));
      CHECK(path_hit_prob_up(t, anc, x) == doctest::Approx(up).epsilon(1e-10));
      const double down = oracle_hit_prob(t, a.parent(x), StateSet::single(t, anc), StateSet::single(t, x));
      CHECK(path_hit_prob_down(t, anc, x) == doctest::Approx(down).epsilon(1e-10));
    }
  }
}

TEST_CASE("beta and rho") {
  const auto d1 = freeze(binary(0.5), 1, 1);
  const auto beta = beta_recursion(d1, 1);
  CHECK(beta[1] == 1.0);
  CHECK(beta[2] == 1.0);
  CHECK(rho(d1, 1) == doctest::Approx(0.5).epsilon(1e-15));

  const auto spec = offspring_0_3();
  const auto dead = freeze(spec, 3, root_dies_seed(spec));
  CHECK(rho(dead, 2) == 0.0);
  CHECK_THROWS_AS(expected_hit_time(dead, 2), DegenerateInputError);
  CHECK(std::isnan(compute_exact(dead, 2).expected_hit_time));
  CHECK_THROWS_AS(beta_recursion(d1, 2), UsageError);
}

TEST_CASE("beta agrees with the oracle and decreases in m") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto t = freeze(seed % 2 ? offspring_0_3() : kappa_two(), 6, seed + 10);
    if (t.vertex_count() < 3) continue;
    const TreeArena& a = t.arena;
    std::vector<double> prev;
    for (std::uint32_t m = 1; m <= 6; ++m) {
      const auto beta = beta_recursion(t, m);
      const auto target = StateSet::generation(t, m);
      for (VertexId x = 0; x < t.vertex_count(); ++x) {
        if (a.generation(x) >= m) {
          if (a.generation(x) > m) CHECK(std::isnan(beta[x]));
          continue;
        }
        const VertexId par = x == kRoot ? kVirtualParent : a.parent(x);
        const double o = oracle_hit_prob(t, x, target, StateSet::single(t, par));
        CHECK(beta[x] == doctest::Approx(o).epsilon(1e-10));
        if (!prev.empty() && a.generation(x) < m - 1) CHECK(beta[x] <= prev[x] + 1e-15);
      }
      StateSet avoid = StateSet::single(t, kRoot);
      avoid.insert(kVirtualParent);
      CHECK(rho(t, m) == doctest::Approx(oracle_hit_prob(t, kRoot, target, avoid)).epsilon(1e-10));
      prev = beta;
    }
  }
}

TEST_CASE("gamma recursion cases") {
  const auto d1 = freeze(binary(0.5), 1, 1);
  const auto g1 = gamma_recursion(d1, 1, beta_recursion(d1, 1));
  CHECK(g1[kRoot] == 0.0);
  CHECK(expected_hit_time(d1, 1) == 0.0);
  CHECK(oracle_expected_time(d1, kRoot, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(expected_hit_time_with_root_term(d1, 1) == doctest::Approx(3.0).epsilon(1e-14));

  const auto spec = offspring_0_3();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = freeze(spec, 4, seed);
    const auto beta = beta_recursion(t, 4);
    const auto gamma = gamma_recursion(t, 4, beta);
    for (VertexId x = 1; x < t.vertex_count(); ++x) {
      const auto g = t.arena.generation(x);
      if (g == 4) CHECK(gamma[x] == 0.0);
      if (g < 4 && t.arena.children(x).empty()) CHECK(gamma[x] == 1.0);
    }
  }
}

TEST_CASE("mean hitting time with the root term equals the oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto t = freeze(seed % 2 ? mixed_chi_neg() : binary(0.5), 6, seed);
    for (std::uint32_t m = 1; m <= 6; ++m) {
      const double o = oracle_expected_time(t, kRoot, m);
      CHECK(expected_hit_time_with_root_term(t, m) == doctest::Approx(o).epsilon(1e-10));
      CHECK(expected_hit_time(t, m) < o);
    }
  }
}

TEST_CASE("oracle solvers agree") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = freeze(kappa_two(), 6, seed);
    const auto target = StateSet::generation(t, 6);
    const auto avoid = StateSet::single(t, kVirtualParent);
    const auto e = oracle_hit_prob_all(t, target, avoid, OracleMethod::kTreeElimination);
    const auto g = oracle_hit_prob_all(t, target, avoid, OracleMethod::kGaussSeidel);
    REQUIRE(e.size() == g.size());
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - g[i]) <= 1e-11);
    const double te = oracle_expected_time(t, kRoot, 5, OracleMethod::kTreeElimination);
    const double tg = oracle_expected_time(t, kRoot, 5, OracleMethod::kGaussSeidel);
    CHECK(tg == doctest::Approx(te).epsilon(1e-11));
  }
}

TEST_CASE("single-path gambler's ruin through the oracle") {
  // binary(1.0): every edge has conductance 1, so the walk along a path is symmetric
  // once side branches are folded back. Use generation hits on a path of length L.
  const auto t = freeze(binary(1.0), 5, 2);
  for (std::uint32_t len = 2; len <= 5; ++len) {
    const VertexId x = first_at_generation(t, len);
    const VertexId start = ancestor_at(t.arena, x, 1);
    const double o = oracle_hit_prob(t, start, StateSet::single(t, x), StateSet::single(t, kRoot));
    CHECK(o == doctest::Approx(1.0 / len).epsilon(1e-12));
  }
}
