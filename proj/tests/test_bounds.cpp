#include <doctest.h>

#include <cmath>

#include "core/bounds.hpp"

using namespace sglab;

TEST_CASE("convexity term by hand") {
  CHECK(convexity_term(1.0, 1.0, 2) == doctest::Approx(0.0));
  CHECK(convexity_term(0.5, -0.5, 2) == doctest::Approx(1.0));  // (x - y)^2
  CHECK(convexity_term(0.0, 1.0, 4) == doctest::Approx(3.0));
  CHECK_THROWS_AS(convexity_term(0.1, 0.2, 3), Error);
}

TEST_CASE("property: convexity term is nonnegative") {
  Rng r(2024);
  double lo = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = 2 * r.uniform() - 1, y = 2 * r.uniform() - 1;
    const int p = 2 * (1 + static_cast<int>(r.index(4)));
    lo = std::min(lo, convexity_term(x, y, p));
  }
  CHECK(lo >= -1e-12);
}

TEST_CASE("Franz-Leone slack is nonnegative") {
  DilutedSpec spec;
  spec.p = 2;
  spec.alpha = 0.5;
  spec.theta = ThetaFamily::ksat(2, 1.0);
  BoundParams mc;
  mc.outer = 800;
  mc.n_disorder = 200;
  auto r = franz_leone_upper(OrderParameter::rs({0.0, 0.5}), spec, 8, mc, 6);
  CHECK(r.slack.value >= -3 * r.slack.se);
}

TEST_CASE("Guerra slack is nonnegative") {
  SKSpec sk;
  sk.betas = {{2, 0.8}};
  BoundParams mc;
  mc.outer = 800;
  mc.n_disorder = 200;
  auto r = guerra_upper_sk(OrderParameter::rs({0.0, 0.0}), sk, 8, mc, 6);
  CHECK(r.slack.value >= -3 * r.slack.se);
}

TEST_CASE("ASS lower bound without clauses is log 2") {
  DilutedSpec spec;
  spec.p = 2;
  spec.alpha = 0.0;
  spec.theta = ThetaFamily::ksat(2, 1.0);
  auto e = ass_lower(spec, 6, 10, 1);
  CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("coupled pairs embed the smaller system") {
  DilutedSpec spec;
  spec.p = 2;
  spec.alpha = 1.0;
  spec.theta = ThetaFamily::pspin(2, 0.5);
  auto [small, big] = sample_diluted_pair(spec, 6, 3);
  CHECK(small.N == 6);
  CHECK(big.N == 7);
}

TEST_CASE("cavity second residual vanishes without perturbation") {
  DilutedSpec spec;
  spec.p = 2;
  spec.alpha = 0.4;
  spec.theta = ThetaFamily::pspin(2, 0.5);
  auto c = cavity_decomposition_check(spec, 6, 100, 4);
  CHECK(std::abs(c.second.residual.value) <= 3 * c.second.residual.se + 1e-12);
  CHECK(std::abs(c.first.residual.value) <= 3 * c.first.residual.se + 1e-9);
}
