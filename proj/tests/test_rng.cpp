#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "edgeoff/rng.hpp"

using namespace edgeoff;

TEST_SUITE("rng") {

TEST_CASE("mix_seed matches the published splitmix64 vector") {
  // splitmix64 next() from state 0; reference value from the original
  // public-domain implementation's test output
  CHECK(mix_seed(0) == 0xE220A8397B1DCDAFull);
  CHECK(mix_seed(0) == mix_seed(0));
  CHECK(mix_seed(1) != mix_seed(0));
}

TEST_CASE("derive_seed separates streams and indices") {
  const std::uint64_t base = 42;
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 1; s <= 9; ++s)
    for (std::uint64_t i = 0; i < 8; ++i)
      seen.insert(derive_seed(base, s, i));
  CHECK(seen.size() == 9 * 8);  // no collisions across the streams we use
  CHECK(derive_seed(base, seed_stream::channels) ==
        derive_seed(base, seed_stream::channels, 0));
  CHECK(derive_seed(base, seed_stream::channels) !=
        derive_seed(base + 1, seed_stream::channels));
}

TEST_CASE("identical seeds give identical sequences") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform lies in [0,1) with the right mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal has unit moments") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("below stays in range and covers the range") {
  Rng rng(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t x = rng.below(5);
    REQUIRE(x < 5);
    ++counts[static_cast<std::size_t>(x)];
  }
  for (int c : counts) CHECK(c > 800);  // ~1000 each
  CHECK(rng.below(1) == 0);
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("poisson mean-50 sample average lands in [49.5, 50.5]") {
  Rng rng(5);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::int64_t d = rng.poisson(50.0);
    REQUIRE(d >= 0);
    sum += static_cast<double>(d);
  }
  const double avg = sum / n;
  CHECK(avg >= 49.5);
  CHECK(avg <= 50.5);
}

TEST_CASE("poisson edge cases") {
  Rng rng(9);
  CHECK(rng.poisson(0.0) == 0);
  CHECK_THROWS_AS(rng.poisson(-1.0), std::invalid_argument);
  // huge mean goes through the normal approximation and stays nonnegative
  for (int i = 0; i < 100; ++i) CHECK(rng.poisson(1e4) > 0);
}

}  // TEST_SUITE
