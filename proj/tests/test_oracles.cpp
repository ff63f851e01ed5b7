#include <doctest.h>

#include <cmath>

#include "app/oracles.hpp"

// The frozen constants are recomputed here with independent numerics.

namespace {

double simpson_gauss(double (*f)(double, double), double c, int n = 20000) {
  const double a = -14.0, h = 28.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    s += w * f(x, c) * std::exp(-0.5 * x * x);
  }
  return s * h / 3.0 / std::sqrt(2.0 * M_PI);
}

double logch(double z, double c) { return std::log(std::cosh(z * c)); }

}  // namespace

TEST_CASE("SK RS quadrature constant") {
  const double b = 0.3, dxi1 = 2 * b * b, th1 = b * b;
  const double v = std::log(2.0) + simpson_gauss(logch, std::sqrt(dxi1)) - th1 / 2;
  CHECK(sglab::app::oracle::kGuerraRSQuadrature == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("SK RS closed form constant") {
  CHECK(sglab::app::oracle::kGuerraRSClosedForm == doctest::Approx(std::log(2.0) + 0.09 / 2).epsilon(1e-15));
}

TEST_CASE("K-sat invariance constant by truncated Poisson sum") {
  const long double alpha = 0.3L, beta = 0.5L;
  const long double a = (1 - std::exp(-beta)) / 2, lam = 2 * alpha;
  long double acc = 0, pk = std::exp(-lam);
  for (int K = 0; K < 60; ++K) {
    long double s = 0, binom = 1;
    for (int j = 0; j <= K; ++j) {
      const long double u = std::pow(1 - a, j), v = std::pow(1 - a, K - j);
      const long double x = (u - v) / (u + v);
      s += binom * std::pow(0.5L, K) * x * x;
      binom = binom * (K - j) / (j + 1);
    }
    acc += pk * s;
    pk *= lam / (K + 1);
  }
  CHECK(sglab::app::oracle::kKsatInvariance == doctest::Approx(static_cast<double>(-acc)).epsilon(1e-13));
}
