#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kbandit/rng.hpp"

using kbandit::RngStream;

TEST_CASE("rng is deterministic per key and counter", "[rng]") {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  // Another key produces a different stream (overwhelmingly likely on the
  // first draw for a 64-bit mixer; frozen here as a regression check).
  RngStream c(43);
  RngStream d(42);
  REQUIRE(c.next_u64() != d.next_u64());
}

TEST_CASE("split streams are independent of parent draw order", "[rng]") {
  RngStream parent(7);
  RngStream child_before = parent.split(3);
  parent.next_u64();
  parent.next_u64();
  RngStream child_after = parent.split(3);
  // split() depends only on the key, not on how much the parent has drawn.
  REQUIRE(child_before.next_u64() == child_after.next_u64());

  REQUIRE(parent.split(1).next_u64() != parent.split(2).next_u64());
}

TEST_CASE("next_double lies in [0,1)", "[rng]") {
  RngStream s(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("next_index covers the range and rejects bad sizes", "[rng]") {
  RngStream s(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const int k = s.next_index(7);
    REQUIRE(k >= 0);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int k = 0; k < 7; ++k) REQUIRE(counts[k] > 0);

  REQUIRE_THROWS_AS(s.next_index(0), std::invalid_argument);
  REQUIRE_THROWS_AS(s.next_index(-3), std::invalid_argument);
}

TEST_CASE("next_gaussian has roughly standard moments", "[rng]") {
  RngStream s(99);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = s.next_gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  REQUIRE(std::abs(mean) < 0.02);
  REQUIRE(std::abs(var - 1.0) < 0.03);
}
