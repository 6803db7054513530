#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "rndiff/rng.hpp"
#include "rndiff/stats.hpp"

using namespace rndiff;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("equal (seed, stream) pairs replay; neighbours differ") {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
}

TEST_CASE("substream packs step and path") {
  CHECK(substream(0, 5) == 5);
  CHECK(substream(3, 5) == ((3ULL << 32) | 5ULL));
  CHECK(substream(1, 0) != substream(0, 1));
}

TEST_CASE("derived seeds are distinct per tag") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t tag = 0; tag < 64; ++tag) seen.insert(derive_seed(1234, tag));
  CHECK(seen.size() == 64);
}

TEST_CASE("uniform stays inside the open unit interval") {
  CounterRng rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("Box-Muller normals have unit moments") {
  CounterRng rng(99, 3);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = rng.normal();
  const SampleMoments m = sample_moments(xs);
  // 4-sigma bands: sd(mean) = 1e-3, sd(var) = sqrt(2) * 1e-3.
  CHECK(std::abs(m.mean) < 4e-3);
  CHECK(std::abs(m.variance - 1.0) < 4 * 1.42e-3);
  double tail = 0.0;
  for (double x : xs) tail += std::abs(x) > 1.959963984540054 ? 1.0 : 0.0;
  CHECK(std::abs(tail / xs.size() - 0.05) < 4 * std::sqrt(0.05 * 0.95 / xs.size()));
}

TEST_CASE("compensated sum recovers small addends") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}
