#include <doctest.h>

#include <cmath>

#include "core/estimate.hpp"

using namespace sglab;

namespace {

DilutedSpec ksat(double alpha, double beta) {
  DilutedSpec s;
  s.p = 2;
  s.alpha = alpha;
  s.theta = ThetaFamily::ksat(2, beta);
  return s;
}

}  // namespace

TEST_CASE("property: flip_delta equals the log-weight difference") {
  auto cs = sample_diluted_disorder(ksat(1.5, 0.8), 9, 4);
  LocalModel lm(cs);
  SKSpec sk;
  sk.betas = {{2, 0.7}};
  const auto sd = sample_sk_disorder(sk, 9, 4);
  LocalModel ls(sd);
  Rng r(1);
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t s = r.bits() & ((1u << 9) - 1);
    const int i = static_cast<int>(r.index(9));
    const std::uint64_t f = s ^ (1ULL << i);
    CHECK(lm.flip_delta(s, i) == doctest::Approx(lm.log_weight(f) - lm.log_weight(s)).epsilon(1e-10));
    CHECK(ls.flip_delta(s, i) == doctest::Approx(ls.log_weight(f) - ls.log_weight(s)).epsilon(1e-10));
  }
}

TEST_CASE("multioverlap by hand") {
  // N = 2: sigma1 = (+,+), sigma2 = (+,-)
  const std::uint64_t c[2] = {0b11, 0b01};
  CHECK(multioverlap_of(c, 2) == doctest::Approx(0.0));
  const std::uint64_t d[2] = {0b11, 0b11};
  CHECK(multioverlap_of(d, 2) == doctest::Approx(1.0));
}

TEST_CASE("free spins: E R12^2 = 1/N") {
  EstimateParams mc;
  mc.n_disorder = 20;
  mc.samples = 2000;
  for (int N : {8, 12}) {
    auto e = multioverlap_N(ksat(0.0, 1.0), N, {{1, 2}, {1, 2}}, mc, 3);
    CHECK(std::abs(e.value - 1.0 / N) <= 4 * e.se);
  }
}

TEST_CASE("chains agree with enumeration") {
  auto cs = sample_diluted_disorder(ksat(1.0, 1.5), 8, 12);
  auto g = enumerate_gibbs(cs);
  const double exact = g.average([](std::uint64_t s) { return spin_of(s, 0) * spin_of(s, 1); });
  LocalModel lm(cs);
  for (auto k : {ChainConfig::Kernel::glauber, ChainConfig::Kernel::metropolis}) {
    ChainConfig ch;
    ch.kernel = k;
    ch.sweeps = 21000;
    ch.burn_in = 1000;
    ch.thinning = 5;
    ch.n_replicas = 4;
    auto smp = mcmc_sample(lm, ch, 5);
    Welford w;
    for (const auto& rep : smp.replicas)
      for (auto s : rep) w.add(spin_of(s, 0) * spin_of(s, 1));
    // thinned samples are correlated; allow a wide band
    CHECK(std::abs(w.mean() - exact) < 0.03);
  }
}

TEST_CASE("chain config validation") {
  ChainConfig ch;
  ch.burn_in = ch.sweeps;
  CHECK_THROWS_AS(ch.validate(), Error);
}

TEST_CASE("finite-N GG residuals shrink") {
  SKSpec sk;
  sk.betas = {{2, 0.8}};
  sk.gg = SKSpec::GG{};
  EstimateParams mc;
  mc.n_disorder = 100;
  mc.samples = 128;
  auto F = [](std::span<const double> R, int n) { return R[0 * n + 1]; };
  auto g = gg_finite_N(sk, {8, 12}, 1, 2, F, mc, 7);
  CHECK(g.rows.size() == 2);
  CHECK(g.monotone);
  for (auto [p, b] : g.beta_N) CHECK(std::abs(b) <= std::pow(2.0, -p));
}
