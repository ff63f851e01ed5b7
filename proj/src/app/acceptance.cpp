#include "app/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>

#include "app/config.hpp"
#include "app/oracles.hpp"
#include "core/bounds.hpp"
#include "core/cascade.hpp"
#include "core/estimate.hpp"
#include "core/functional.hpp"
#include "core/invariance.hpp"

namespace sglab::app {

namespace {

using Clock = std::chrono::steady_clock;

// wall-clock limits in seconds
constexpr double kLimit[kCriteria + 1] = {0, 1, 120, 300, 300, 60, 180, 180, 600, 300, 1, 600, 180, 3600};

struct Run {
  Criterion c;
  std::uint64_t seed;
  int threads;
  bool ok = true;

  Run(int id, std::string title, std::uint64_t master, int th)
      : seed(seed_derive(master, {"acceptance", std::to_string(id)})), threads(th) {
    c.id = id;
    c.title = std::move(title);
  }

  std::uint64_t sub(const std::string& label) const { return seed_derive(seed, {label}); }

  ResultRow& row(const std::string& q, const Estimate& e, std::uint64_t s) {
    ResultRow r;
    r.experiment = "acceptance";
    r.quantity = "c" + std::to_string(c.id) + "/" + q;
    r.value = e.value;
    r.se = e.se;
    r.bias = e.bias;
    r.n_samples = e.n;
    r.seed = s;
    c.rows.push_back(r);
    return c.rows.back();
  }
  ResultRow& scalar(const std::string& q, double v, std::uint64_t s) {
    Estimate e;
    e.value = v;
    e.n = 1;
    return row(q, e, s);
  }
  // asserted row
  void check(ResultRow& r, bool pass, const std::string& what) {
    r.pass = pass;
    if (!pass) {
      ok = false;
      if (!c.detail.empty()) c.detail += "; ";
      c.detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool within_k(const Estimate& e, double target, double k) {
  return std::abs(e.value - target) <= std::max(k * e.se, 1e-12);
}

DilutedSpec diluted(bool ksat, int p, double alpha, double beta) {
  DilutedSpec d;
  d.p = p;
  d.alpha = alpha;
  d.theta = ksat ? ThetaFamily::ksat(p, beta) : ThetaFamily::pspin(p, beta);
  return d;
}

SKSpec sk2(double beta) {
  SKSpec s;
  s.betas = {{2, beta}};
  return s;
}

OrderParameter cascade_1rsb_sc(const SKSpec& sk) {
  CascadeSpec cs;
  cs.q = {0.0, 0.5};
  cs.m = {0.0, 0.4};
  return OrderParameter::cascade_sk({cs, sk, true});
}

OrderParameter rs_fixed_point(const SKSpec& sk) {
  CascadeSpec rs;
  rs.q = {0.5};
  rs.m = {0.0};
  auto sol = solve_parisi_q(rs, sk);
  return OrderParameter::rs({0.0, std::sqrt(sk.dxi(sol.q[0]))});
}

// ---- criteria ----

void c1(Run& r) {
  const double l2 = std::log(2.0);
  for (int N : {4, 8}) {
    const auto s1 = r.sub("diluted/" + std::to_string(N));
    auto e = free_energy_quenched(diluted(true, 2, 0.0, 1.0), N, 8, s1, r.threads);
    r.check(r.row(fmt("F_N[diluted,alpha=0,N=%g]", N), e, s1), std::abs(e.value - l2) <= 1e-12,
            fmt("diluted N=%g off log 2 by %.3g", N, e.value - l2));
    const auto s2 = r.sub("sk/" + std::to_string(N));
    auto f = free_energy_quenched(sk2(0.0), N, 8, s2, r.threads);
    r.check(r.row(fmt("F_N[sk,beta=0,N=%g]", N), f, s2), std::abs(f.value - l2) <= 1e-12,
            fmt("SK N=%g off log 2 by %.3g", N, f.value - l2));
  }
}

void c2(Run& r) {
  const std::pair<int, int> pairs[] = {{4, 4}, {4, 8}, {6, 6}};
  for (int model = 0; model < 2; ++model) {
    const std::string name = model == 0 ? "ksat" : "sk";
    std::map<int, Estimate> F;
    for (int N : {4, 6, 8, 12}) {
      const auto s = r.sub(name + "/" + std::to_string(N));
      F[N] = model == 0 ? free_energy_quenched(diluted(true, 2, 0.5, 1.0), N, 1000, s, r.threads)
                        : free_energy_quenched(sk2(0.5), N, 1000, s, r.threads);
      r.row("F_N[" + name + fmt(",N=%g]", N), F[N], s);
    }
    for (auto [N, M] : pairs) {
      // gap = (N+M) F_{N+M} - N F_N - M F_M; coefficients merge when N == M
      std::map<int, double> coef;
      coef[N + M] += N + M;
      coef[N] -= N;
      coef[M] -= M;
      Estimate g;
      double var = 0.0;
      for (auto [k, a] : coef) {
        g.value += a * F[k].value;
        var += a * a * F[k].se * F[k].se;
      }
      g.se = std::sqrt(var);
      g.n = F[N].n;
      r.check(r.row("superadditivity_gap[" + name + fmt(",N=%g,M=%g]", N, M), g, 0), g.value >= -3.0 * g.se,
              name + fmt(" (%g,%g) gap %.4g", N, M, g.value));
    }
  }
}

void c3(Run& r) {
  BoundParams mc{2000, 128, 400, r.threads};
  for (double hsd : {0.0, 0.5})
    for (int fam = 0; fam < 2; ++fam)
      for (double beta : {0.5, 1.0})
        for (double alpha : {0.2, 0.5}) {
          const std::string pt = std::string(fam == 0 ? "ksat" : "pspin") + fmt(",beta=%g,alpha=%g,h_sd=%g", beta, alpha, hsd);
          const auto s = r.sub(pt);
          auto b = franz_leone_upper(OrderParameter::rs({0.0, hsd}), diluted(fam == 0, 2, alpha, beta), 8, mc, s);
          r.check(r.row("slack[" + pt + "]", b.slack, s), b.slack.value >= -3.0 * b.slack.se, "FL " + pt);
        }
}

void c4(Run& r) {
  BoundParams mc{2000, 128, 400, r.threads};
  for (double beta : {0.3, 0.8, 1.2}) {
    const SKSpec sk = sk2(beta);
    auto rs = rs_fixed_point(sk);
    const auto s1 = r.sub(fmt("rs/%g", beta));
    auto b1 = guerra_upper_sk(rs, sk, 10, mc, s1);
    r.check(r.row(fmt("slack[rs,beta=%g]", beta), b1.slack, s1), b1.slack.value >= -3.0 * b1.slack.se,
            fmt("Guerra RS beta=%g", beta));
    CascadeSpec cs;
    cs.q = {0.0, 0.5};
    cs.m = {0.0, 0.4};
    auto cas = OrderParameter::cascade_sk({cs, sk, beta > 1.0});
    const auto s2 = r.sub(fmt("1rsb/%g", beta));
    auto b2 = guerra_upper_sk(cas, sk, 10, mc, s2);
    r.check(r.row(fmt("slack[1rsb,beta=%g]", beta), b2.slack, s2), b2.slack.value >= -3.0 * b2.slack.se,
            fmt("Guerra 1RSB beta=%g", beta));
  }
  const SKSpec sk = sk2(0.3);
  const auto s = r.sub("P");
  auto P = eval_P_sk(rs_fixed_point(sk), sk, {2000, 128, r.threads}, s);
  r.check(r.row("P_rs_vs_quadrature_oracle", P, s), within_k(P, oracle::kGuerraRSQuadrature, 3.0),
          fmt("P(RS)=%.6f vs quadrature oracle %.6f", P.value, oracle::kGuerraRSQuadrature));
  // reported alongside; not part of the criterion
  r.row("P_rs_vs_closed_form", P, s).pass = within_k(P, oracle::kGuerraRSClosedForm, 3.0);
}

void c5(Run& r) {
  const double specs[][3] = {{0.2, 0.6, 0.4}, {0.0, 0.5, 0.7}};
  for (const auto& sp : specs) {
    CascadeSpec cs;
    cs.q = {sp[0], sp[1]};
    cs.m = {0.0, sp[2]};
    const std::string pt = fmt("q1=%g,q2=%g,m2=%g", sp[0], sp[1], sp[2]);
    const auto s = r.sub(pt);
    auto law = overlap_law(cs, {4000, 64, r.threads}, s);
    const auto& e = law.prob[0];
    r.check(r.row("P(R=q1)[" + pt + "]", e, s), std::abs(e.value - sp[2]) <= 4.0 * e.se,
            fmt("P(R=q1)=%.4f vs m2=%g", e.value, sp[2]));
    r.check(r.scalar("ultrametric_violations[" + pt + "]", static_cast<double>(law.ultrametric_violations), s),
            law.ultrametric_violations == 0, "ultrametric violations");
  }
}

void c6(Run& r) {
  CascadeSpec one, two;
  one.q = {0.2, 0.6};
  one.m = {0.0, 0.4};
  two.q = {0.1, 0.4, 0.8};
  two.m = {0.0, 0.3, 0.6};
  const char* Fname[] = {"1", "r12", "r12^2"};
  for (int k = 0; k < 2; ++k)
    for (int p = 1; p <= 3; ++p)
      for (int n = 2; n <= 3; ++n)
        for (int a = 0; a <= 2; ++a) {
          const std::string pt = std::string(k ? "2rsb" : "1rsb") + fmt(",p=%g,n=%g,F=", p, n) + Fname[a];
          const auto s = r.sub(pt);
          auto e = gg_on_cascade(k ? two : one, p, n, GGFunction{a}, {2000, 128, r.threads}, s);
          r.check(r.row("gg_residual[" + pt + "]", e, s), within_k(e, 0.0, 3.0), "GG " + pt);
        }
}

void c7(Run& r) {
  const SKSpec sk = sk2(1.2);
  auto cas = cascade_1rsb_sc(sk);
  InvarianceParams mc{2000, 512, r.threads};
  for (int p : {1, 2}) {
    const auto s = r.sub(fmt("cascade/p%g", p));
    for (const auto& g : gg_variance(cas, p, {0.25, 0.5, 1.0}, mc, s))
      r.check(r.row(fmt("gg_variance[p=%g,t=%g]", p, g.t), g.direct, s), within_k(g.direct, 1.0, 3.0),
              fmt("variance p=%g t=%g is %.4f", p, g.t, g.direct.value));
  }
  const double c = 0.8;
  const auto s = r.sub("mixture");
  auto mix = gg_variance(OrderParameter::tabulated(TabulatedParams::two_state(c)), 1, {1.0}, mc, s);
  const auto& b = mix[0].bracket;
  r.check(r.row("bracket[two-state,t=1]", b, s), b.value > 0.0 && b.value >= 5.0 * b.se,
          fmt("mixture bracket %.4g (se %.3g)", b.value, b.se));
  r.row("bracket_expected[two-state]", Estimate{std::pow(c, 4) / 4.0, 0.0, 0.0, 1, s}, s);
}

void c8(Run& r) {
  InvarianceParams mc{2000, 512, r.threads};
  const SKSpec sk = sk2(1.2);
  auto cas = cascade_1rsb_sc(sk);
  for (const char* preset : {"sk-general", "sk-ascsk", "sk-prebscsk", "sk-invar"})
    for (const auto& ic : preset_cases(preset)) {
      const std::string pt = std::string(preset) + "/" + ic.label();
      const auto s = r.sub(pt);
      auto res = invariance_sk(cas, sk, ic, mc, s);
      r.check(r.row("residual[" + pt + "]", res.residual, s), within_k(res.residual, 0.0, 3.0), pt);
    }
  for (const auto& oc : overlap_only_cases()) {
    const std::string pt = "sk-overlap-only/" + to_string(oc.F) + fmt("/n%gr%g", oc.n, oc.r);
    const auto s = r.sub(pt);
    auto res = overlap_invariance_sk(cas, sk, oc.F, oc.n, oc.r, mc, s);
    r.check(r.row("residual[" + pt + "]", res.residual, s), within_k(res.residual, 0.0, 3.0), pt);
  }
  for (const auto& ic : preset_cases("sk-ss")) {
    const std::string pt = "sk-ss/t=0.5/" + ic.label();
    const auto s = r.sub(pt);
    auto res = stochastic_stability_sk(cas, 1, 0.5, ic, mc, s);
    r.check(r.row("residual[" + pt + "]", res.residual, s), within_k(res.residual, 0.0, 3.0), pt);
  }
  // degenerate diluted cases: the uniform measure is exactly invariant
  const auto rs0 = OrderParameter::rs({0.0, 0.0});
  const std::pair<const char*, DilutedSpec> degenerate[] = {{"alpha=0", diluted(true, 2, 0.0, 1.0)},
                                                            {"theta=0", diluted(false, 2, 0.5, 0.0)}};
  InvarianceParams small{200, 512, r.threads};
  for (const auto& [name, spec] : degenerate)
    for (const char* preset : {"sc-general", "sc-asc", "sc-prebsc", "sc-ascsc"})
      for (const auto& ic : preset_cases(preset)) {
        const std::string pt = std::string(name) + "/" + preset + "/" + ic.label();
        const auto s = r.sub(pt);
        auto res = invariance_diluted(rs0, spec, ic, small, s);
        r.check(r.row("residual[" + pt + "]", res.residual, s), std::abs(res.residual.value) <= 1e-12, pt);
      }
  const auto s = r.sub("ksat-oracle");
  auto res = invariance_diluted(rs0, diluted(true, 2, 0.3, 0.5), {1, 2, 1, {{1}, {1}}}, {20000, 512, r.threads}, s);
  r.check(r.row("residual_vs_oracle[ksat,alpha=0.3,beta=0.5]", res.residual, s),
          within_k(res.residual, oracle::kKsatInvariance, 3.0),
          fmt("K-sat residual %.5f vs oracle %.5f", res.residual.value, oracle::kKsatInvariance));
}

void c9(Run& r) {
  FunctionalParams mc{2000, 128, r.threads};
  auto rs = OrderParameter::rs({0.0, 0.5});
  auto pn_rows = [&](const std::string& name, auto&& eval) {
    std::vector<Estimate> P;
    for (int n = 1; n <= 3; ++n) {
      const auto s = r.sub(name + fmt("/n%g", n));
      P.push_back(eval(n, s));
      r.row("P_n[" + name + fmt(",n=%g]", n), P.back(), s);
    }
    for (int n = 2; n <= 3; ++n) {
      auto d = minus(P[n - 1], P[0]);
      r.check(r.row("P_n-P_1[" + name + fmt(",n=%g]", n), d, 0), within_k(d, 0.0, 3.0),
              name + fmt(" P_%g - P_1 = %.4g", n, d.value));
    }
  };
  for (int fam = 0; fam < 2; ++fam) {
    const auto spec = diluted(fam == 0, 2, 0.5, 1.0);
    pn_rows(fam == 0 ? "rs,ksat" : "rs,pspin",
            [&](int n, std::uint64_t s) { return eval_Pn_diluted(rs, spec, n, mc, s); });
  }
  const SKSpec sk = sk2(1.2);
  auto cas = cascade_1rsb_sc(sk);
  pn_rows("cascade-1rsb,sk", [&](int n, std::uint64_t s) { return eval_Pn_sk(cas, sk, n, mc, s); });
}

void c10(Run& r) {
  Rng rng(r.sub("xyp"));
  double lo = INFINITY;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * rng.uniform() - 1.0, y = 2.0 * rng.uniform() - 1.0;
    const int p = 2 * (1 + static_cast<int>(rng.index(4)));
    lo = std::min(lo, convexity_term(x, y, p));
  }
  Estimate e{lo, 0.0, 0.0, n, r.sub("xyp")};
  r.check(r.row("min_convexity_term", e, e.seed), lo >= -1e-12, fmt("min %.3g", lo));
}

void c11(Run& r) {
  SKSpec sk = sk2(0.8);
  sk.gg = SKSpec::GG{};
  EstimateParams mc;
  mc.n_disorder = 400;
  mc.samples = 256;
  mc.threads = r.threads;
  const auto s = r.sub("gg");
  auto g = gg_finite_N(sk, {8, 12, 16}, 1, 2, [](std::span<const double> R, int) { return R[1]; }, mc, s);
  for (const auto& row : g.rows) r.row(fmt("gg_residual[F=r12,N=%g]", row.N), row.residual, s);
  r.check(r.scalar("monotone", g.monotone, s), g.monotone,
          fmt("|res(16)| %.4g vs |res(8)| %.4g", std::abs(g.rows.back().residual.value),
              std::abs(g.rows.front().residual.value)));
  const auto s0 = r.sub("null");
  auto z = gg_finite_N(sk, {8, 16}, 1, 2, [](std::span<const double>, int) { return 1.0; }, mc, s0);
  for (const auto& row : z.rows)
    r.row(fmt("gg_residual[F=1,N=%g]", row.N), row.residual, s0).pass = within_k(row.residual, 0.0, 3.0);
}

void c12(Run& r) {
  const auto spec = diluted(false, 2, 0.4, 0.5);
  std::vector<Estimate> res;
  for (int N : {6, 10}) {
    const auto s = r.sub(fmt("N%g", N));
    res.push_back(cavity_decomposition_check(spec, N, 2000, s, r.threads).first.residual);
    r.row(fmt("cavity_residual[N=%g]", N), res.back(), s);
  }
  Estimate d;
  d.value = std::abs(res[1].value) - std::abs(res[0].value);
  d.se = std::hypot(res[0].se, res[1].se);
  d.n = res[0].n;
  r.check(r.row("shrinkage", d, 0), d.value <= 3.0 * d.se, fmt("|res10|-|res6| = %.4g", d.value));
}

using Fn = void (*)(Run&);

struct Def {
  const char* title;
  Fn fn;
};

const Def kDefs[kCriteria] = {
    {"exactness anchors", c1},
    {"superadditivity of N F_N", c2},
    {"Franz-Leone bound", c3},
    {"Guerra bound and RS quadrature oracle", c4},
    {"cascade overlap law and ultrametricity", c5},
    {"GG identities on cascades", c6},
    {"Gaussian stochastic stability variance", c7},
    {"invariance residuals", c8},
    {"P_n decoupling", c9},
    {"convexity inequality", c10},
    {"finite-N GG decay", c11},
    {"cavity decomposition shrinkage", c12},
    {"bit-exact reproducibility", nullptr},
};

Criterion run_one(int id, std::uint64_t seed, int threads) {
  Run r(id, kDefs[id - 1].title, seed, threads);
  const auto t0 = Clock::now();
  try {
    kDefs[id - 1].fn(r);
  } catch (const std::exception& e) {
    r.ok = false;
    r.c.detail = std::string("error: ") + e.what();
  }
  r.c.wall = std::chrono::duration<double>(Clock::now() - t0).count();
  r.c.limit = kLimit[id];
  r.c.checks = r.ok;
  r.c.pass = r.ok && r.c.wall <= r.c.limit;
  if (r.ok && !r.c.pass) r.c.detail = fmt("over time limit (%.1f s)", r.c.limit);
  return r.c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

std::vector<Criterion> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<int> ids = opt.only;
  if (ids.empty())
    for (int k = 1; k <= kCriteria; ++k) ids.push_back(k);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<Criterion> out;
  for (int id : ids) {
    if (id == kCriteria) continue;
    out.push_back(run_one(id, opt.seed, opt.threads));
    if (opt.on_done) opt.on_done(out.back());
  }
  if (ids.back() != kCriteria) return out;

  // rerun with a different worker count and compare every value bit for bit
  Run r(kCriteria, kDefs[kCriteria - 1].title, opt.seed, opt.threads);
  const auto t0 = Clock::now();
  std::vector<Criterion> first = out;
  if (first.empty())
    for (int id : {1, 5, 10}) first.push_back(run_one(id, opt.seed, opt.threads));
  const int other = opt.threads == 1 ? 2 : 1;
  std::size_t compared = 0, mismatched = 0;
  for (const auto& a : first) {
    auto b = run_one(a.id, opt.seed, other);
    if (b.rows.size() != a.rows.size()) {
      ++mismatched;
      continue;
    }
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      ++compared;
      const auto &x = a.rows[i], &y = b.rows[i];
      if (x.quantity != y.quantity || !same_bits(x.value, y.value) || !same_bits(x.se, y.se) || x.seed != y.seed)
        ++mismatched;
    }
  }
  r.scalar("values_compared", static_cast<double>(compared), opt.seed);
  r.check(r.scalar("mismatches", static_cast<double>(mismatched), opt.seed), mismatched == 0 && compared > 0,
          fmt("%g of %g values differ", mismatched, compared));
  r.c.wall = std::chrono::duration<double>(Clock::now() - t0).count();
  r.c.limit = kLimit[kCriteria];
  r.c.checks = r.ok;
  r.c.pass = r.ok && r.c.wall <= r.c.limit;
  out.push_back(r.c);
  if (opt.on_done) opt.on_done(out.back());
  return out;
}

std::string format_line(const Criterion& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-42s %8.1f s (limit %g s)", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                c.wall, c.limit);
  std::string s = buf;
  if (!c.detail.empty()) s += "  " + c.detail;
  return s;
}

}  // namespace sglab::app
