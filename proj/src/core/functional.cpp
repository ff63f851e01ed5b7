#include "core/functional.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"

namespace sglab {

namespace {

void guard(const FunctionalParams& mc) {
  if (mc.outer < 2) throw Error(ErrorCode::invalid_argument, "outer must be >= 2", "mc.outer");
  if (mc.inner < 100) throw Error(ErrorCode::invalid_argument, "inner must be >= 100", "mc.inner");
}

void check_theta(const ThetaDraw& th) {
  for (double t : th.table)
    if (!std::isfinite(t)) throw Error(ErrorCode::numeric, "non-finite theta draw", "model.theta");
}

double lse_weighted(std::span<const double> logw, std::span<const double> x) { return log_sum_exp(x, logw); }

}  // namespace

void theta_log_mean(const World& world, const ThetaDraw& th, unsigned fixed, int n_fixed,
                    std::span<const std::size_t> sites, std::span<double> out) {
  const int free = th.p - n_fixed;
  require(free == static_cast<int>(sites.size()), "theta_log_mean: argument count mismatch");
  const double tmax = *std::max_element(th.table.begin(), th.table.end());
  std::vector<const std::vector<double>*> sv(free);
  for (int j = 0; j < free; ++j) sv[j] = &world.site(sites[j]);
  const unsigned npat = 1u << free;
  for (std::size_t a = 0; a < out.size(); ++a) {
    double acc = 0.0;
    for (unsigned pat = 0; pat < npat; ++pat) {
      double w = 1.0;
      for (int j = 0; j < free; ++j) {
        double s = (*sv[j])[a];
        w *= (pat >> j & 1u) ? 0.5 * (1.0 + s) : 0.5 * (1.0 - s);
      }
      if (w == 0.0) continue;
      acc += w * std::exp(th(fixed | (pat << n_fixed)) - tmax);
    }
    out[a] = tmax + std::log(acc);
  }
}

DilutedCavity draw_cavity_A(const World& world, const DilutedSpec& spec, SiteCounter& sites, Rng& rng) {
  const std::size_t na = world.atoms();
  DilutedCavity c;
  c.a_plus.assign(na, 0.0);
  c.a_minus.assign(na, 0.0);
  const std::uint64_t K = rng.poisson(spec.p * spec.alpha);
  std::vector<double> tmp(na);
  for (std::uint64_t k = 0; k < K; ++k) {
    ThetaDraw th = draw_theta(spec.theta, rng);
    check_theta(th);
    auto s = sites.take(spec.p - 1);
    theta_log_mean(world, th, 1u, 1, s, tmp);
    for (std::size_t a = 0; a < na; ++a) c.a_plus[a] += tmp[a];
    theta_log_mean(world, th, 0u, 1, s, tmp);
    for (std::size_t a = 0; a < na; ++a) c.a_minus[a] += tmp[a];
  }
  return c;
}

std::vector<double> draw_cavity_B(const World& world, const DilutedSpec& spec, std::uint64_t count, SiteCounter& sites,
                                  Rng& rng) {
  const std::size_t na = world.atoms();
  std::vector<double> b(na, 0.0), tmp(na);
  for (std::uint64_t k = 0; k < count; ++k) {
    ThetaDraw th = draw_theta(spec.theta, rng);
    check_theta(th);
    auto s = sites.take(spec.p);
    theta_log_mean(world, th, 0u, 0, s, tmp);
    for (std::size_t a = 0; a < na; ++a) b[a] += tmp[a];
  }
  return b;
}

Estimate eval_P_diluted(const OrderParameter& sigma, const DilutedSpec& spec, const FunctionalParams& mc,
                        std::uint64_t seed) {
  return eval_Pn_diluted(sigma, spec, 1, mc, seed);
}

Estimate eval_Pn_diluted(const OrderParameter& sigma, const DilutedSpec& spec, int n, const FunctionalParams& mc,
                         std::uint64_t seed) {
  spec.validate();
  guard(mc);
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be >= 1", "params.n");
  std::vector<double> vals(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto world = sigma.draw_world(seed_child(seed, 2 * i));
    Rng rng(seed_child(seed, 2 * i + 1));
    SiteCounter sc;
    const std::size_t na = world->atoms();
    std::vector<double> la(na, 0.0), lb(na, 0.0);
    for (int j = 0; j < n; ++j) {
      auto A = draw_cavity_A(*world, spec, sc, rng);
      for (std::size_t a = 0; a < na; ++a) {
        double hi = std::max(A.a_plus[a], A.a_minus[a]), lo = std::min(A.a_plus[a], A.a_minus[a]);
        la[a] += hi + std::log1p(std::exp(lo - hi)) - std::log(2.0);
      }
      auto B = draw_cavity_B(*world, spec, rng.poisson((spec.p - 1) * spec.alpha), sc, rng);
      for (std::size_t a = 0; a < na; ++a) lb[a] += B[a];
    }
    auto lw = world->log_weights();
    vals[i] = std::log(2.0) + (lse_weighted(lw, la) - lse_weighted(lw, lb)) / n;
  });
  return mean_estimate(vals, seed);
}

Estimate plast_check(const OrderParameter& sigma, const DilutedSpec& spec, const FunctionalParams& mc,
                     std::uint64_t seed) {
  spec.validate();
  guard(mc);
  std::vector<double> vals(mc.outer);
  const double lam = (spec.p - 1) * spec.alpha;
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto world = sigma.draw_world(seed_child(seed, 2 * i));
    Rng rng(seed_child(seed, 2 * i + 1));
    SiteCounter sc;
    auto lw = world->log_weights();
    auto B = draw_cavity_B(*world, spec, rng.poisson(lam), sc, rng);
    auto one = draw_cavity_B(*world, spec, 1, sc, rng);
    vals[i] = lse_weighted(lw, B) - lam * lse_weighted(lw, one);
  });
  return mean_estimate(vals, seed);
}

SKFields draw_sk_field(const World& world, const Kernel& psi, Rng& rng) {
  SKFields f;
  const std::size_t na = world.atoms();
  f.g.resize(na);
  f.b2.resize(na);
  world.gaussian_field(psi, rng, f.g);
  const double top = psi.f(1.0);
  for (std::size_t a = 0; a < na; ++a) f.b2[a] = std::max(0.0, top - psi.f(world.self_overlap(a)));
  return f;
}

Estimate eval_P_sk(const OrderParameter& sigma, const SKSpec& spec, const FunctionalParams& mc, std::uint64_t seed) {
  return eval_Pn_sk(sigma, spec, 1, mc, seed);
}

Estimate eval_Pn_sk(const OrderParameter& sigma, const SKSpec& spec, int n, const FunctionalParams& mc,
                    std::uint64_t seed) {
  spec.validate();
  guard(mc);
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be >= 1", "params.n");
  const Kernel kx = kernel_dxi(spec), kt = kernel_theta(spec);
  std::vector<double> vals(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto world = sigma.draw_world(seed_child(seed, 2 * i));
    Rng rng(seed_child(seed, 2 * i + 1));
    const std::size_t na = world->atoms();
    std::vector<double> la(na, 0.0), lb(na, 0.0);
    for (int j = 0; j < n; ++j) {
      auto X = draw_sk_field(*world, kx, rng);
      auto T = draw_sk_field(*world, kt, rng);
      for (std::size_t a = 0; a < na; ++a) {
        la[a] += log_ch(X.g[a]) + 0.5 * X.b2[a];
        lb[a] += T.g[a] + 0.5 * T.b2[a];
      }
    }
    auto lw = world->log_weights();
    vals[i] = std::log(2.0) + (lse_weighted(lw, la) - lse_weighted(lw, lb)) / n;
  });
  return mean_estimate(vals, seed);
}

}  // namespace sglab
