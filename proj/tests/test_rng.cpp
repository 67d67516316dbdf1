#include <doctest.h>

#include <set>

#include "rwre/rng.hpp"

using namespace rwre;

TEST_CASE("mix64 reference values") {
  CHECK(mix64(0) == 0);
  CHECK(mix64(1) == 0x5692161d100b05e5ULL);
  CHECK(mix64(0xdeadbeefULL) == 0x4e062702ec929eeaULL);
}

TEST_CASE("derive_seed reference vectors") {
  CHECK(derive_seed(0, 0, 0) == 0x238275bc38fcbe91ULL);
  CHECK(derive_seed(42, 0, 0) == 0x6310bf04d8207f46ULL);
  CHECK(derive_seed(42, 1, 0) == 0x2ce02c4ee4d2ea09ULL);
  CHECK(derive_seed(42, 0, 1) == 0xb682ee25ce24109eULL);
  CHECK(derive_seed(12345, 7, kWalkStreamTag) == 0x4713cac86fa1379bULL);
}

TEST_CASE("structural keys and counter stream") {
  const auto rk = root_key(7);
  CHECK(rk == 0x63cbe1e459320dd7ULL);
  CHECK(child_key(rk, 0) == 0x395954383b5f6eb0ULL);
  CounterStream s(rk);
  CHECK(s.next() == 0xb8b4c2977eabce45ULL);
  CHECK(s.next() == 0xa65305fd338ec8feULL);
}

TEST_CASE("uniform draws lie in [0,1)") {
  CounterStream s(99);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("seeds differ across replicas and attempts") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 100; ++r)
    for (std::uint64_t a = 0; a < 10; ++a) seen.insert(derive_seed(5, r, a));
  CHECK(seen.size() == 1000);
}
