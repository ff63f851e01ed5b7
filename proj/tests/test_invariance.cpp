#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/invariance.hpp"

using namespace sglab;

namespace {

bool near0(const Residual& r, double k = 3.0) {
  return std::abs(r.residual.value) <= k * r.residual.se + 1e-12;
}

OrderParameter cascade_sigma(const SKSpec& sk) {
  CascadeSKParams p;
  p.sk = sk;
  p.cascade.q = {0.0, 0.5};
  p.cascade.m = {0.0, 0.4};
  return OrderParameter::cascade_sk(p);
}

}  // namespace

TEST_CASE("every named battery exists") {
  const auto& names = preset_names();
  for (const char* n : {"sc-general", "sc-asc", "sc-prebsc", "sc-ascsc", "sk-general", "sk-ascsk", "sk-prebscsk",
                        "sk-invar", "sk-ss"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
    CHECK(!preset_cases(n).empty());
  }
  CHECK_THROWS_AS(preset_cases("nope"), Error);
}

TEST_CASE("degenerate diluted cases vanish exactly") {
  DilutedSpec spec;
  spec.p = 2;
  spec.alpha = 0.0;
  spec.theta = ThetaFamily::ksat(2, 1.0);
  InvarianceParams mc;
  mc.outer = 100;
  for (const auto& c : preset_cases("sc-asc")) {
    auto r = invariance_diluted(OrderParameter::rs({0.0, 0.5}), spec, c, mc, 3);
    CHECK(r.residual.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("SK invariance on a self-consistent cascade") {
  SKSpec sk;
  sk.betas = {{2, 1.2}};
  InvarianceParams mc;
  mc.outer = 600;
  const auto sigma = cascade_sigma(sk);
  auto cases = preset_cases("sk-ascsk");
  for (std::size_t i = 0; i < std::min<std::size_t>(cases.size(), 3); ++i)
    CHECK(near0(invariance_sk(sigma, sk, cases[i], mc, 40 + i)));
}

TEST_CASE("Gaussian stochastic stability: variance one") {
  SKSpec sk;
  sk.betas = {{2, 1.2}};
  InvarianceParams mc;
  mc.outer = 800;
  auto rows = gg_variance(cascade_sigma(sk), 1, {0.5, 1.0}, mc, 9);
  for (const auto& r : rows) CHECK(std::abs(r.direct.value - 1.0) <= 3 * r.direct.se);
}

TEST_CASE("a u-mixture of two pure states has a positive bracket") {
  InvarianceParams mc;
  mc.outer = 400;
  auto rows = gg_variance(OrderParameter::tabulated(TabulatedParams::two_state(0.8)), 1, {1.0}, mc, 2);
  // bracket = c^4 / 4 for p = 1
  CHECK(rows[0].bracket.value == doctest::Approx(std::pow(0.8, 4) / 4).epsilon(0.1));
}

TEST_CASE("invalid cases are rejected") {
  InvarianceCase c;
  c.n = 1;
  c.m = 1;
  c.C = {{5}};
  CHECK_THROWS_AS(c.validate(), Error);
}
