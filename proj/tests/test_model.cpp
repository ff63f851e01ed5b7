#include <doctest.h>

#include <cmath>

#include "core/model.hpp"

using namespace sglab;

namespace {

DilutedSpec ksat(double alpha, double beta) {
  DilutedSpec s;
  s.p = 2;
  s.alpha = alpha;
  s.theta = ThetaFamily::ksat(2, beta);
  return s;
}

SKSpec sk2(double beta) {
  SKSpec s;
  s.betas = {{2, beta}};
  return s;
}

}  // namespace

TEST_CASE("spin config index round trip") {
  for (std::uint64_t i = 0; i < 64; ++i) CHECK(SpinConfig::from_index(i, 6).index() == i);
  auto s = SpinConfig::from_index(5, 3);  // bits 0 and 2 set
  CHECK(s.spins[0] == 1);
  CHECK(s.spins[1] == -1);
  CHECK(s.spins[2] == 1);
}

TEST_CASE("free energy is log 2 without interactions") {
  for (int N : {4, 8}) {
    auto e = free_energy_quenched(ksat(0.0, 1.0), N, 20, 1);
    CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(e.se == 0.0);
    auto s = free_energy_quenched(sk2(0.0), N, 20, 1);
    CHECK(s.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
}

TEST_CASE("log partition matches brute force") {
  auto cs = sample_diluted_disorder(ksat(1.0, 0.7), 6, 11);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < 64; ++i) acc += std::exp(cs.log_weight(SpinConfig::from_index(i, 6)));
  CHECK(log_partition(cs) == doctest::Approx(std::log(acc)).epsilon(1e-12));

  auto d = sample_sk_disorder(sk2(0.9), 5, 3);
  acc = 0.0;
  for (std::uint64_t i = 0; i < 32; ++i) acc += std::exp(d.log_weight(SpinConfig::from_index(i, 5)));
  CHECK(log_partition(d) == doctest::Approx(std::log(acc)).epsilon(1e-12));
}

TEST_CASE("gibbs table is a distribution") {
  auto g = enumerate_gibbs(sample_diluted_disorder(ksat(0.8, 1.0), 7, 5));
  double sum = 0.0;
  for (double p : g.probabilities) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.average([](std::uint64_t) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(g.sample(0.0) == 0);
}

TEST_CASE("one 2-sat clause by hand") {
  // theta = log(1 - (1 - e^-beta) [both literals false])
  ClauseSet cs;
  cs.N = 2;
  DilutedSpec spec = ksat(1.0, 1.0);
  Rng rng(1);
  Clause c;
  c.idx = {0, 1};
  c.theta = draw_theta(spec.theta, rng);
  cs.clauses.push_back(c);
  // exactly one configuration violates the clause
  int violated = 0;
  for (std::uint64_t i = 0; i < 4; ++i) {
    const double lw = cs.log_weight(SpinConfig::from_index(i, 2));
    if (std::abs(lw + 1.0) < 1e-12)
      ++violated;
    else
      CHECK(std::abs(lw) < 1e-12);
  }
  CHECK(violated == 1);
}

TEST_CASE("sk mixture functions") {
  SKSpec s;
  s.betas = {{2, 0.5}, {4, 0.3}};
  for (double x : {0.0, 0.3, 1.0}) {
    const double xi = 0.25 * std::pow(x, 2) + 0.09 * std::pow(x, 4);
    const double dxi = 0.5 * x + 0.36 * std::pow(x, 3);
    CHECK(s.xi(x) == doctest::Approx(xi));
    CHECK(s.dxi(x) == doctest::Approx(dxi));
    CHECK(s.theta(x) == doctest::Approx(x * dxi - xi));
  }
  CHECK(s.max_p() == 4);
}

TEST_CASE("spec validation") {
  DilutedSpec odd = ksat(0.5, 1.0);
  odd.p = 3;
  odd.theta = ThetaFamily::pspin(3, 1.0);
  CHECK_THROWS_AS(odd.validate(), Error);
  DilutedSpec neg = ksat(-0.1, 1.0);
  CHECK_THROWS_AS(neg.validate(), Error);
  SKSpec bad;
  bad.betas = {{3, 0.5}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("theta families pass their checks") {
  auto r = validate_theta(ThetaFamily::ksat(2, 1.0), 4, 2000, 9);
  CHECK(r.ok);
  CHECK(r.bounded);
  auto p = validate_theta(ThetaFamily::pspin(2, 0.5), 4, 2000, 9);
  CHECK(p.ok);
}

TEST_CASE("property: N F_N is superadditive at small sizes") {
  const auto spec = ksat(0.5, 1.0);
  auto F = [&](int N) { return free_energy_quenched(spec, N, 300, seed_derive(5, {"F", std::to_string(N)})); };
  const auto a = F(4), b = F(8);
  const double lhs = 8 * a.value;
  const double rhs = 8 * b.value;
  CHECK(lhs <= rhs + 3 * std::hypot(8 * a.se, 8 * b.se));
}
