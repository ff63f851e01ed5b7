#include <doctest.h>

#include <cmath>
#include <string>
#include <unordered_set>

#include "core/common.hpp"
#include "core/rng.hpp"

using namespace sglab;

TEST_CASE("splitmix64 and fnv1a64 reference values") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("seed_derive golden vectors") {
  // frozen at first implementation; any change breaks reproducibility of stored results
  CHECK(seed_derive(12345, {"free-energy", "F_N"}) == 6948356462369014153ULL);
  CHECK(seed_derive(0, {"a"}) == 17370190796433346670ULL);
  CHECK(seed_child(42, 7) == 10467427919047011171ULL);
  Rng r(1);
  CHECK(r.bits() == 12966619160104079557ULL);
  CHECK(r.bits() == 9600361134598540522ULL);
  CHECK(r.bits() == 10590380919521690900ULL);
}

TEST_CASE("seed_derive is deterministic and label sensitive") {
  CHECK(seed_derive(7, {"x", "y"}) == seed_derive(7, {"x", "y"}));
  CHECK(seed_derive(7, {"x", "y"}) != seed_derive(7, {"x", "z"}));
  CHECK(seed_derive(7, {"x", "y"}) != seed_derive(7, {"y", "x"}));
  CHECK(seed_derive(7, {"xy"}) != seed_derive(7, {"x", "y"}));
  CHECK(seed_derive(7, {"x"}) != seed_derive(8, {"x"}));
  CHECK_THROWS_AS(seed_derive(7, std::vector<std::string>{}), Error);
}

TEST_CASE("no collisions over a million final labels") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2'000'000);
  for (int i = 0; i < 1'000'000; ++i) seen.insert(seed_derive(12345, {"run", "q" + std::to_string(i)}));
  CHECK(seen.size() == 1'000'000);
}

TEST_CASE("uniform, normal and exponential moments") {
  Rng r(99);
  Welford u, z, z2, e;
  for (int i = 0; i < 200000; ++i) {
    const double x = r.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    u.add(x);
    const double g = r.normal();
    z.add(g);
    z2.add(g * g);
    e.add(r.exponential());
  }
  CHECK(std::abs(u.mean() - 0.5) < 4 * u.se());
  CHECK(std::abs(z.mean()) < 4 * z.se());
  CHECK(std::abs(z2.mean() - 1.0) < 4 * z2.se());
  CHECK(std::abs(e.mean() - 1.0) < 4 * e.se());
}

TEST_CASE("poisson_inverse matches the pmf") {
  const double mean = 2.5;
  double cdf = 0.0, p = std::exp(-mean);
  for (int k = 0; k < 12; ++k) {
    cdf += p;
    // just below and above each cdf step
    CHECK(poisson_inverse(mean, cdf - 1e-9) == static_cast<std::uint64_t>(k));
    CHECK(poisson_inverse(mean, cdf + 1e-9) == static_cast<std::uint64_t>(k + 1));
    p *= mean / (k + 1);
  }
}

TEST_CASE("index stays in range") {
  Rng r(3);
  for (int i = 0; i < 10000; ++i) {
    const auto k = r.index(7);
    REQUIRE(k < 7);
  }
}
