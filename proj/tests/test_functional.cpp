#include <doctest.h>

#include <cmath>

#include "core/functional.hpp"

using namespace sglab;

namespace {

DilutedSpec ksat(double alpha, double beta) {
  DilutedSpec s;
  s.p = 2;
  s.alpha = alpha;
  s.theta = ThetaFamily::ksat(2, beta);
  return s;
}

bool near(const Estimate& e, double target, double k = 3.0) { return std::abs(e.value - target) <= k * e.se + 1e-12; }

}  // namespace

TEST_CASE("diluted functional without clauses is log 2") {
  FunctionalParams mc;
  mc.outer = 200;
  auto e = eval_P_diluted(OrderParameter::rs({0.0, 0.5}), ksat(0.0, 1.0), mc, 1);
  CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("SK functional at an RS point with zero field") {
  // with sigma-bar = 0 the z-completion gives log 2 + xi'(1)/2 - theta(1)/2 = log 2 + xi(1)/2
  SKSpec sk;
  sk.betas = {{2, 0.3}};
  FunctionalParams mc;
  mc.outer = 500;
  auto e = eval_P_sk(OrderParameter::rs({0.0, 0.0}), sk, mc, 2);
  CHECK(e.value == doctest::Approx(std::log(2.0) + 0.5 * 0.09).epsilon(1e-10));
}

TEST_CASE("P_n agrees with P for RS laws") {
  FunctionalParams mc;
  mc.outer = 1500;
  const auto sigma = OrderParameter::rs({0.0, 0.5});
  const auto spec = ksat(0.5, 1.0);
  auto p1 = eval_Pn_diluted(sigma, spec, 1, mc, 10);
  auto p2 = eval_Pn_diluted(sigma, spec, 2, mc, 11);
  CHECK(near(minus(p2, p1), 0.0));
}

TEST_CASE("same seed gives identical values") {
  FunctionalParams mc;
  mc.outer = 200;
  const auto sigma = OrderParameter::rs({0.1, 0.3});
  auto a = eval_P_diluted(sigma, ksat(0.5, 1.0), mc, 5);
  auto b = eval_P_diluted(sigma, ksat(0.5, 1.0), mc, 5);
  CHECK(a.value == b.value);
  CHECK(a.se == b.se);
}
