#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/order_param.hpp"
#include "core/quadrature.hpp"

using namespace sglab;

namespace {

// E f(z) by composite Simpson on [-12, 12]
template <class F>
double gauss_simpson(F f, int n = 4000) {
  const double a = -12.0, h = 24.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    s += w * f(x) * std::exp(-0.5 * x * x);
  }
  return s * h / 3.0 / std::sqrt(2.0 * M_PI);
}

}  // namespace

TEST_CASE("gauss-hermite rule moments") {
  const auto& g = gauss_hermite(32);
  double m0 = 0, m2 = 0, m4 = 0, m1 = 0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    m0 += g.w[i];
    m1 += g.w[i] * g.x[i];
    m2 += g.w[i] * g.x[i] * g.x[i];
    m4 += g.w[i] * std::pow(g.x[i], 4);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(m1) < 1e-13);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("RS fixed point solves q = E th^2(z sqrt(xi'(q)))") {
  SKSpec sk;
  sk.betas = {{2, 1.3}};
  CascadeSpec start;
  start.q = {0.5};
  start.m = {0.0};
  auto sol = solve_parisi_q(start, sk);
  const double q = sol.q[0];
  CHECK(q > 0.1);
  const double rhs = gauss_simpson([&](double z) { return std::pow(std::tanh(z * std::sqrt(sk.dxi(q))), 2); });
  CHECK(q == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("RS world has a single atom with constant site law") {
  auto op = OrderParameter::rs({0.0, 0.0});
  auto w = op.draw_world(1);
  CHECK(w->atoms() == 1);
  CHECK(w->weights()[0] == doctest::Approx(1.0));
  CHECK(op.rs_self_overlap() == doctest::Approx(0.0));
}

TEST_CASE("two-state table: overlaps c^2 within, 0 across") {
  auto op = OrderParameter::tabulated(TabulatedParams::two_state(0.8));
  MultiOverlapParams mc;
  mc.outer = 400;
  auto r = multioverlap(op, {{1, 2}}, mc, 3);
  // states are equally weighted: E R12 = (0.64 + 0) / 2
  CHECK(std::abs(r.value - 0.32) <= 4 * r.se + 1e-9);
}

TEST_CASE("tabulated grid loads from text") {
  const auto path = std::filesystem::temp_directory_path() / "sglab_table_test.txt";
  {
    std::ofstream f(path);
    f << "# w u v mean\n0 0 0 0.5\n0 0 1 -0.5\n0 1 0 0.25\n0 1 1 0.0\n";
  }
  auto t = TabulatedParams::load(path.string());
  CHECK(t.nu == 2);
  CHECK(t.nv == 2);
  CHECK(t.at(0, 0, 1) == doctest::Approx(-0.5));
  {
    std::ofstream f(path);
    f << "0 0 0 0.5\n0 0 1\n";
  }
  CHECK_THROWS_AS(TabulatedParams::load(path.string()), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(TabulatedParams::load(path.string()), Error);
}

TEST_CASE("cascade world overlaps equal the self-consistent q") {
  SKSpec sk;
  sk.betas = {{2, 1.2}};
  CascadeSKParams p;
  p.sk = sk;
  p.cascade.q = {0.0, 0.5};
  p.cascade.m = {0.0, 0.4};
  p.self_consistent = true;
  auto op = OrderParameter::cascade_sk(p);
  const auto& qt = op.recursion().overlaps();
  for (int l = 0; l < 2; ++l) CHECK(qt[l] == doctest::Approx(op.cascade().q[l]).epsilon(1e-6));
}
