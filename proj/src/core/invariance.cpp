#include "core/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/parallel.hpp"

namespace sglab {

void InvarianceCase::validate() const {
  if (n < 0 || m < 1 || n > m) throw Error(ErrorCode::invalid_argument, "need 0 <= n <= m, m >= 1", "params.case");
  if (r < 0) throw Error(ErrorCode::invalid_argument, "r must be >= 0", "params.case");
  if (C.empty()) throw Error(ErrorCode::invalid_argument, "need q >= 1 sets", "params.case");
  for (const auto& s : C)
    for (int i : s)
      if (i < 1 || i > m) throw Error(ErrorCode::invalid_argument, "set element outside 1..m", "params.case");
}

std::string InvarianceCase::label() const {
  std::string s = "n" + std::to_string(n) + "m" + std::to_string(m) + "q" + std::to_string(q()) + "r" +
                  std::to_string(r) + "C";
  for (const auto& c : C) {
    s += "{";
    for (std::size_t j = 0; j < c.size(); ++j) s += (j ? "," : "") + std::to_string(c[j]);
    s += "}";
  }
  return s;
}

std::string to_string(OverlapF f) {
  switch (f) {
    case OverlapF::r12:
      return "R12";
    case OverlapF::r12_sq:
      return "R12^2";
    case OverlapF::r12_r13:
      return "R12*R13";
  }
  return "?";
}

namespace {

void guard(const InvarianceParams& mc) {
  if (mc.outer < 2) throw Error(ErrorCode::invalid_argument, "outer must be >= 2", "mc.outer");
  if (mc.inner < 1) throw Error(ErrorCode::invalid_argument, "inner must be >= 1", "mc.inner");
}

std::vector<double> normalized_tilt(std::span<const double> logw, std::span<const double> logv) {
  std::vector<double> x(logw.size());
  double mx = -INFINITY;
  for (std::size_t a = 0; a < x.size(); ++a) mx = std::max(mx, x[a] = logw[a] + logv[a]);
  double s = 0.0;
  for (auto& v : x) s += (v = std::exp(v - mx));
  for (auto& v : x) v /= s;
  return x;
}

// cav[i][a]: cavity spin of coordinate i+1 at atom a (only i < n used)
std::pair<double, double> one_draw(const World& world, const InvarianceCase& c, std::span<const double> logv,
                                   const std::vector<std::vector<double>>& cav) {
  const std::size_t na = world.atoms();
  auto w = world.weights();
  auto wt = normalized_tilt(world.log_weights(), logv);
  std::vector<const std::vector<double>*> site(c.m + 1, nullptr);
  for (int i = 1; i <= c.m; ++i) site[i] = &world.site(static_cast<std::size_t>(i - 1));
  double lhs = 1.0, rhs = 1.0;
  for (const auto& set : c.C) {
    double L = 0.0, R = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      double pl = 1.0, pr = 1.0;
      for (int i : set) {
        double s = (*site[i])[a];
        pl *= s;
        pr *= (i <= c.n) ? cav[i - 1][a] : s;
      }
      L += w[a] * pl;
      R += wt[a] * pr;
    }
    lhs *= L;
    rhs *= R;
  }
  return {lhs, rhs};
}

Residual finish(const std::vector<double>& l, const std::vector<double>& r, std::uint64_t seed) {
  Residual out;
  out.lhs = mean_estimate(l, seed);
  out.rhs = mean_estimate(r, seed);
  out.residual = minus(out.lhs, out.rhs);
  return out;
}

}  // namespace

Residual invariance_diluted(const OrderParameter& sigma, const DilutedSpec& spec, const InvarianceCase& c,
                            const InvarianceParams& mc, std::uint64_t seed) {
  spec.validate();
  c.validate();
  guard(mc);
  std::vector<double> L(mc.outer), R(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t k) {
    auto world = sigma.draw_world(seed_child(seed, 2 * k));
    Rng rng(seed_child(seed, 2 * k + 1));
    SiteCounter sc(static_cast<std::size_t>(c.m));
    const std::size_t na = world->atoms();
    std::vector<double> logv(na, 0.0);
    std::vector<std::vector<double>> cav(c.n, std::vector<double>(na));
    for (int i = 0; i < c.n; ++i) {
      auto A = draw_cavity_A(*world, spec, sc, rng);
      for (std::size_t a = 0; a < na; ++a) {
        double hi = std::max(A.a_plus[a], A.a_minus[a]);
        double ep = std::exp(A.a_plus[a] - hi), em = std::exp(A.a_minus[a] - hi);
        cav[i][a] = (ep - em) / (ep + em);
        logv[a] += hi + std::log(0.5 * (ep + em));
      }
    }
    auto B = draw_cavity_B(*world, spec, static_cast<std::uint64_t>(c.r), sc, rng);
    for (std::size_t a = 0; a < na; ++a) logv[a] += B[a];
    std::tie(L[k], R[k]) = one_draw(*world, c, logv, cav);
  });
  return finish(L, R, seed);
}

Residual invariance_sk(const OrderParameter& sigma, const SKSpec& spec, const InvarianceCase& c,
                       const InvarianceParams& mc, std::uint64_t seed) {
  spec.validate();
  c.validate();
  guard(mc);
  const Kernel kx = kernel_dxi(spec), kt = kernel_theta(spec);
  std::vector<double> L(mc.outer), R(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t k) {
    auto world = sigma.draw_world(seed_child(seed, 2 * k));
    Rng rng(seed_child(seed, 2 * k + 1));
    const std::size_t na = world->atoms();
    std::vector<double> logv(na, 0.0);
    std::vector<std::vector<double>> cav(c.n, std::vector<double>(na));
    for (int i = 0; i < c.n; ++i) {
      auto X = draw_sk_field(*world, kx, rng);
      for (std::size_t a = 0; a < na; ++a) {
        cav[i][a] = std::tanh(X.g[a]);
        logv[a] += log_ch(X.g[a]) + 0.5 * X.b2[a];
      }
    }
    for (int j = 0; j < c.r; ++j) {
      auto T = draw_sk_field(*world, kt, rng);
      for (std::size_t a = 0; a < na; ++a) logv[a] += T.g[a] + 0.5 * T.b2[a];
    }
    std::tie(L[k], R[k]) = one_draw(*world, c, logv, cav);
  });
  return finish(L, R, seed);
}

Residual stochastic_stability_sk(const OrderParameter& sigma, int p, double t, const InvarianceCase& c,
                                 const InvarianceParams& mc, std::uint64_t seed) {
  if (p < 1) throw Error(ErrorCode::invalid_argument, "p must be >= 1", "params.p");
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "t must be > 0", "params.t");
  c.validate();
  guard(mc);
  InvarianceCase sites = c;
  sites.n = 0;
  const Kernel kp = kernel_pow(p);
  std::vector<double> L(mc.outer), R(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t k) {
    auto world = sigma.draw_world(seed_child(seed, 2 * k));
    Rng rng(seed_child(seed, 2 * k + 1));
    auto G = draw_sk_field(*world, kp, rng);
    std::vector<double> logv(world->atoms());
    for (std::size_t a = 0; a < logv.size(); ++a) logv[a] = t * G.g[a] + 0.5 * t * t * G.b2[a];
    std::tie(L[k], R[k]) = one_draw(*world, sites, logv, {});
  });
  return finish(L, R, seed);
}

namespace {

double overlap_functional(const World& world, std::span<const double> w, OverlapF F) {
  const std::size_t na = world.atoms();
  double s = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < na; ++b) {
      double R = world.overlap(a, b);
      row += w[b] * (F == OverlapF::r12_sq ? R * R : R);
    }
    s += w[a] * (F == OverlapF::r12_r13 ? row * row : row);
  }
  return s;
}

}  // namespace

Residual overlap_invariance_sk(const OrderParameter& sigma, const SKSpec& spec, OverlapF F, int n, int r,
                               const InvarianceParams& mc, std::uint64_t seed) {
  spec.validate();
  guard(mc);
  if (n < 0 || r < 0) throw Error(ErrorCode::invalid_argument, "n, r must be >= 0", "params.case");
  const Kernel kx = kernel_dxi(spec), kt = kernel_theta(spec);
  std::vector<double> L(mc.outer), R(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t k) {
    auto world = sigma.draw_world(seed_child(seed, 2 * k));
    Rng rng(seed_child(seed, 2 * k + 1));
    const std::size_t na = world->atoms();
    std::vector<double> logv(na, 0.0);
    for (int i = 0; i < n; ++i) {
      auto X = draw_sk_field(*world, kx, rng);
      for (std::size_t a = 0; a < na; ++a) logv[a] += log_ch(X.g[a]) + 0.5 * X.b2[a];
    }
    for (int j = 0; j < r; ++j) {
      auto T = draw_sk_field(*world, kt, rng);
      for (std::size_t a = 0; a < na; ++a) logv[a] += T.g[a] + 0.5 * T.b2[a];
    }
    auto wt = normalized_tilt(world->log_weights(), logv);
    L[k] = overlap_functional(*world, world->weights(), F);
    R[k] = overlap_functional(*world, wt, F);
  });
  return finish(L, R, seed);
}

std::vector<GGVariance> gg_variance(const OrderParameter& sigma, int p, const std::vector<double>& ts,
                                    const InvarianceParams& mc, std::uint64_t seed) {
  if (p < 1) throw Error(ErrorCode::invalid_argument, "p must be >= 1", "params.p");
  for (double t : ts)
    if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "t values must be > 0", "params.t");
  guard(mc);
  const std::size_t nt = ts.size();
  const Kernel kp = kernel_pow(p);
  // per t: X1, X2; then S1, S2, S3
  std::vector<std::vector<double>> cols(2 * nt + 3, std::vector<double>(mc.outer));
  parallel_for(mc.outer, mc.threads, [&](std::size_t k) {
    auto world = sigma.draw_world(seed_child(seed, 2 * k));
    Rng rng(seed_child(seed, 2 * k + 1));
    const std::size_t na = world->atoms();
    auto G = draw_sk_field(*world, kp, rng);
    std::vector<double> logv(na);
    for (std::size_t j = 0; j < nt; ++j) {
      const double t = ts[j];
      for (std::size_t a = 0; a < na; ++a) logv[a] = t * G.g[a] + 0.5 * t * t * G.b2[a];
      auto wt = normalized_tilt(world->log_weights(), logv);
      double x1 = 0.0, x2 = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        double mu = G.g[a] + t * G.b2[a];
        x1 += wt[a] * mu;
        x2 += wt[a] * (mu * mu + G.b2[a]);
      }
      cols[2 * j][k] = x1;
      cols[2 * j + 1][k] = x2;
    }
    auto w = world->weights();
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      double row1 = 0.0, row2 = 0.0;
      for (std::size_t b = 0; b < na; ++b) {
        double rp = std::pow(world->overlap(a, b), p);
        row1 += w[b] * rp;
        row2 += w[b] * rp * rp;
      }
      s1 += w[a] * row1;
      s2 += w[a] * row2;
      s3 += w[a] * row1 * row1;
    }
    cols[2 * nt][k] = s1;
    cols[2 * nt + 1][k] = s2;
    cols[2 * nt + 2][k] = s3;
  });
  std::vector<GGVariance> out(nt);
  std::vector<std::vector<double>> sc = {cols[2 * nt], cols[2 * nt + 1], cols[2 * nt + 2]};
  Estimate bracket = delta_estimate(
      sc, [](std::span<const double> m) { return m[1] - 2.0 * m[2] + m[0] * m[0]; }, seed);
  for (std::size_t j = 0; j < nt; ++j) {
    out[j].t = ts[j];
    out[j].direct = delta_estimate(
        {cols[2 * j], cols[2 * j + 1]}, [](std::span<const double> m) { return m[1] - m[0] * m[0]; }, seed);
    out[j].bracket = bracket;
    out[j].algebraic = bracket;
    const double t2 = ts[j] * ts[j];
    out[j].algebraic.value = 1.0 - t2 * bracket.value;
    out[j].algebraic.se = t2 * bracket.se;
    out[j].algebraic.bias = -t2 * bracket.bias;
  }
  return out;
}

namespace {

using Cases = std::vector<InvarianceCase>;

const std::map<std::string, Cases>& presets() {
  static const std::map<std::string, Cases> table = [] {
    Cases general = {{1, 2, 1, {{1, 2}, {2}}}, {2, 3, 2, {{1, 3}, {2, 3}}}, {1, 3, 1, {{1}, {1, 2}, {3}}}};
    Cases asc = {{1, 2, 0, {{2}, {2}}}, {1, 3, 0, {{2, 3}, {3}}}, {2, 3, 0, {{3}, {3}, {3}}}};
    Cases prebsc = {{0, 1, 1, {{1}, {1}}}, {0, 2, 2, {{1, 2}, {2}}}, {0, 3, 3, {{1}, {2}, {1, 3}}}};
    Cases ascsc = {{1, 1, 0, {{1}, {1}}}, {2, 2, 0, {{1, 2}, {1}}}, {3, 3, 0, {{1}, {2, 3}, {1, 3}}}};
    Cases ss = {{0, 1, 0, {{1}, {1}}}, {0, 2, 0, {{1, 2}, {1, 2}}}, {0, 3, 0, {{1}, {1, 2}, {3}}}};
    return std::map<std::string, Cases>{
        {"sc-general", general}, {"sc-asc", asc},     {"sc-prebsc", prebsc},     {"sc-ascsc", ascsc},
        {"sk-general", general}, {"sk-ascsk", asc},   {"sk-prebscsk", prebsc},   {"sk-invar", ascsc},
        {"sk-ss", ss},
    };
  }();
  return table;
}

}  // namespace

std::vector<InvarianceCase> preset_cases(const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end()) throw Error(ErrorCode::config, "unknown invariance preset '" + name + "'", "params.preset");
  return it->second;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"sc-general", "sc-asc",      "sc-prebsc", "sc-ascsc",
                                                 "sk-general", "sk-ascsk",    "sk-prebscsk", "sk-invar",
                                                 "sk-overlap-only", "sk-ss", "sk-gss"};
  return names;
}

std::vector<OverlapCase> overlap_only_cases() {
  std::vector<OverlapCase> out;
  for (OverlapF F : {OverlapF::r12, OverlapF::r12_sq, OverlapF::r12_r13})
    for (auto [n, r] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{2, 1}}) out.push_back({F, n, r});
  return out;
}

}  // namespace sglab
