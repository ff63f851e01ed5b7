#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/cascade.hpp"

using namespace sglab;

namespace {

CascadeSpec spec1(double q1, double q2, double m2) {
  CascadeSpec s;
  s.q = {q1, q2};
  s.m = {0.0, m2};
  return s;
}

}  // namespace

TEST_CASE("weights sum to one and leaves are consistent") {
  CascadeSpec s;
  s.q = {0.1, 0.4, 0.8};
  s.m = {0.0, 0.3, 0.6};
  for (std::uint64_t seed : {1, 2, 3}) {
    auto c = sample_cascade(s, seed);
    const double sum = std::accumulate(c.weights.begin(), c.weights.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (double w : c.weights) CHECK(w >= 0.0);
    for (std::size_t a = 0; a < c.size(); ++a) CHECK(c.ancestor(a, 0) == 0);
  }
}

TEST_CASE("same seed, same cascade") {
  auto a = sample_cascade(spec1(0.2, 0.6, 0.4), 77);
  auto b = sample_cascade(spec1(0.2, 0.6, 0.4), 77);
  CHECK(a.weights == b.weights);
}

TEST_CASE("property: overlaps are ultrametric") {
  CascadeSpec s;
  s.q = {0.1, 0.4, 0.8};
  s.m = {0.0, 0.3, 0.6};
  auto c = sample_cascade(s, 5);
  const std::size_t n = std::min<std::size_t>(c.size(), 60);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t d = 0; d < n; ++d) {
        const double r1 = c.overlap(a, b), r2 = c.overlap(a, d), r3 = c.overlap(b, d);
        REQUIRE(r1 >= std::min(r2, r3));
      }
}

TEST_CASE("1-RSB overlap law: P(R = q1) = m") {
  McParams mc;
  mc.outer = 2000;
  for (auto [q1, q2, m] : {std::tuple{0.2, 0.6, 0.4}, {0.0, 0.5, 0.7}}) {
    auto law = overlap_law(spec1(q1, q2, m), mc, 21);
    CHECK(std::abs(law.prob[0].value - m) <= 4 * law.prob[0].se);
    CHECK(law.ultrametric_violations == 0);
  }
}

TEST_CASE("2-RSB overlap law: increments of m") {
  CascadeSpec s;
  s.q = {0.1, 0.4, 0.8};
  s.m = {0.0, 0.3, 0.6};
  McParams mc;
  mc.outer = 3000;
  auto law = overlap_law(s, mc, 8);
  const double want[3] = {0.3, 0.3, 0.4};
  for (int l = 0; l < 3; ++l) CHECK(std::abs(law.prob[l].value - want[l]) <= 4 * law.prob[l].se);
}

TEST_CASE("GG identity with F = R12 on cascades") {
  McParams mc;
  mc.outer = 1500;
  auto e = gg_on_cascade(spec1(0.2, 0.6, 0.4), 1, 2, GGFunction{1}, mc, 4);
  CHECK(std::abs(e.value) <= 3 * e.se + 1e-12);
  CascadeSpec s;
  s.q = {0.1, 0.4, 0.8};
  s.m = {0.0, 0.3, 0.6};
  auto f = gg_on_cascade(s, 2, 3, GGFunction{2}, mc, 4);
  CHECK(std::abs(f.value) <= 3 * f.se + 1e-12);
}

TEST_CASE("level variances telescope") {
  const double q[3] = {0.2, 0.5, 0.9};
  auto psi = [](double x) { return 1.0 + x * x; };
  auto v = level_variances(q, psi);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(psi(0.2)));
  CHECK(v[1] == doctest::Approx(psi(0.5) - psi(0.2)));
  CHECK(v[0] + v[1] + v[2] == doctest::Approx(psi(0.9)));
}

TEST_CASE("invalid cascades are rejected") {
  CHECK_THROWS_AS(spec1(0.6, 0.2, 0.4).validate(), Error);
  CHECK_THROWS_AS(spec1(0.2, 0.6, 1.2).validate(), Error);
}
