#include "core/bounds.hpp"

#include <cmath>

#include "core/parallel.hpp"

namespace sglab {

double convexity_term(double x, double y, int p) {
  if (p < 2 || !is_even(p)) throw Error(ErrorCode::invalid_argument, "p must be even and >= 2", "params.p");
  return std::pow(x, p) - p * x * std::pow(y, p - 1) + (p - 1) * std::pow(y, p);
}

namespace {

BoundReport report(Estimate F, Estimate bound) {
  BoundReport r;
  r.F_N = F;
  r.bound = bound;
  r.slack = minus(bound, F);
  return r;
}

FunctionalParams fparams(const BoundParams& mc) { return {mc.outer, mc.inner, mc.threads}; }

}  // namespace

BoundReport franz_leone_upper(const OrderParameter& sigma, const DilutedSpec& spec, int N, const BoundParams& mc,
                              std::uint64_t seed) {
  if (N < 1 || N > kMaxBoundDiluted)
    throw Error(ErrorCode::limit, "N must lie in 1.." + std::to_string(kMaxBoundDiluted), "params.N");
  DilutedSpec plain = spec;
  plain.perturbation = false;
  auto F = free_energy_quenched(plain, N, mc.n_disorder, seed_derive(seed, {"F_N"}), mc.threads);
  auto B = eval_Pn_diluted(sigma, plain, N, fparams(mc), seed_derive(seed, {"bound"}));
  return report(F, B);
}

BoundReport guerra_upper_sk(const OrderParameter& sigma, const SKSpec& spec, int N, const BoundParams& mc,
                            std::uint64_t seed) {
  if (N < 1 || N > kMaxBoundSK)
    throw Error(ErrorCode::limit, "N must lie in 1.." + std::to_string(kMaxBoundSK), "params.N");
  SKSpec plain = spec;
  plain.perturbation = false;
  plain.gg.reset();
  auto F = free_energy_quenched(plain, N, mc.n_disorder, seed_derive(seed, {"F_N"}), mc.threads);
  auto B = eval_Pn_sk(sigma, plain, N, fparams(mc), seed_derive(seed, {"bound"}));
  return report(F, B);
}

namespace {

Clause clause_from(const DilutedSpec& spec, std::uint64_t seed, int n_sites, int arity) {
  Rng r(seed);
  Clause c;
  c.theta = draw_theta(spec.theta, r);
  c.idx.resize(arity);
  for (auto& i : c.idx) i = static_cast<int>(r.uniform() * n_sites);
  return c;
}

}  // namespace

std::pair<ClauseSet, ClauseSet> sample_diluted_pair(const DilutedSpec& spec, int N, std::uint64_t seed) {
  spec.validate();
  require(N >= 1, "N must be >= 1");
  Rng rng(seed);
  ClauseSet small, big;
  small.N = N;
  big.N = N + 1;
  const double u = rng.uniform();
  const auto Ks = poisson_inverse(spec.alpha * N, u), Kb = poisson_inverse(spec.alpha * (N + 1), u);
  const std::uint64_t cs = seed_child(seed, 1);
  // same uniforms, scaled to N or N+1 sites
  for (std::uint64_t k = 0; k < std::max(Ks, Kb); ++k) {
    if (k < Ks) small.clauses.push_back(clause_from(spec, seed_child(cs, k), N, spec.p));
    if (k < Kb) big.clauses.push_back(clause_from(spec, seed_child(cs, k), N + 1, spec.p));
  }
  if (spec.perturbation) {
    const double ub = rng.uniform();
    const auto Bs = poisson_inverse(DilutedSpec::c_N(N), ub), Bb = poisson_inverse(DilutedSpec::c_N(N + 1), ub);
    const std::uint64_t bs = seed_child(seed, 2);
    for (std::uint64_t l = 0; l < std::max(Bs, Bb); ++l) {
      Rng br(seed_child(bs, l));
      const auto T = br.poisson(spec.alpha * spec.p);
      std::vector<Clause> s, b;
      for (std::uint64_t k = 0; k < T; ++k) {
        s.push_back(clause_from(spec, seed_child(seed_child(bs, l), k), N, spec.p - 1));
        b.push_back(clause_from(spec, seed_child(seed_child(bs, l), k), N + 1, spec.p - 1));
      }
      if (l < Bs) small.blocks.push_back(std::move(s));
      if (l < Bb) big.blocks.push_back(std::move(b));
    }
  }
  return {std::move(small), std::move(big)};
}

namespace {

SKTensor restrict_tensor(const SKTensor& t, int N_big, int N, double coef) {
  SKTensor out;
  out.p = t.p;
  out.coef = coef;
  std::size_t n = 1;
  for (int r = 0; r < t.p; ++r) n *= static_cast<std::size_t>(N);
  out.g.resize(n);
  std::vector<int> idx(t.p, 0);
  for (std::size_t f = 0; f < n; ++f) {
    std::size_t rem = f, src = 0;
    for (int r = t.p - 1; r >= 0; --r) {
      idx[r] = static_cast<int>(rem % N);
      rem /= N;
    }
    for (int r = 0; r < t.p; ++r) src = src * N_big + idx[r];
    out.g[f] = t.g[src];
  }
  return out;
}

}  // namespace

std::pair<SKDisorder, SKDisorder> sample_sk_pair(const SKSpec& spec, int N, std::uint64_t seed) {
  require(N >= 1, "N must be >= 1");
  SKSpec plain = spec;
  plain.perturbation = false;
  SKDisorder big = sample_sk_disorder(plain, N + 1, seed);
  SKDisorder small;
  small.N = N;
  const double n = N;
  std::size_t j = 0;
  for (auto [p, b] : plain.betas) small.terms.push_back(restrict_tensor(big.terms[j++], N + 1, N, b * std::pow(n, -(p - 1) / 2.0)));
  if (plain.gg) {
    const double delta = std::pow(n, -plain.gg->delta_exponent);
    for (auto [p, b] : plain.gg->beta_N)
      small.terms.push_back(restrict_tensor(big.terms[j++], N + 1, N, delta * b * std::pow(n, -(p - 1) / 2.0)));
  }
  return {std::move(small), std::move(big)};
}

Estimate ass_lower(const DilutedSpec& spec, int N, int n_disorder, std::uint64_t seed, int threads) {
  spec.validate();
  if (N < 1 || N + 1 > kMaxBoundDiluted)
    throw Error(ErrorCode::limit, "need N+1 <= " + std::to_string(kMaxBoundDiluted), "params.N");
  if (n_disorder < 2) throw Error(ErrorCode::invalid_argument, "n_disorder must be >= 2", "mc.n_disorder");
  std::vector<double> d(n_disorder);
  parallel_for(n_disorder, threads, [&](std::size_t i) {
    auto [s, b] = sample_diluted_pair(spec, N, seed_child(seed, i));
    d[i] = log_partition(b) - log_partition(s);
  });
  return mean_estimate(d, seed);
}

Estimate ass_lower(const SKSpec& spec, int N, int n_disorder, std::uint64_t seed, int threads) {
  spec.validate();
  if (N < 1 || N + 1 > kMaxBoundSK)
    throw Error(ErrorCode::limit, "need N+1 <= " + std::to_string(kMaxBoundSK), "params.N");
  if (n_disorder < 2) throw Error(ErrorCode::invalid_argument, "n_disorder must be >= 2", "mc.n_disorder");
  std::vector<double> d(n_disorder);
  parallel_for(n_disorder, threads, [&](std::size_t i) {
    auto [s, b] = sample_sk_pair(spec, N, seed_child(seed, i));
    d[i] = log_partition(b) - log_partition(s);
  });
  return mean_estimate(d, seed);
}

namespace {

// clause on rho sites with the cavity spin (site N) at argument positions `at`
Clause cavity_clause(const DilutedSpec& spec, std::uint64_t seed, int N, unsigned at) {
  Rng r(seed);
  Clause c;
  c.theta = draw_theta(spec.theta, r);
  c.idx.resize(spec.p);
  for (int j = 0; j < spec.p; ++j) c.idx[j] = (at >> j & 1u) ? N : static_cast<int>(r.uniform() * N);
  return c;
}

}  // namespace

CavityCheck cavity_decomposition_check(const DilutedSpec& spec, int N, int n_disorder, std::uint64_t seed,
                                       int threads) {
  spec.validate();
  if (N < spec.p || N > kMaxCavity)
    throw Error(ErrorCode::limit, "need p <= N <= " + std::to_string(kMaxCavity), "params.N");
  if (n_disorder < 2) throw Error(ErrorCode::invalid_argument, "n_disorder must be >= 2", "mc.n_disorder");
  const int p = spec.p;
  const double a = spec.alpha, n1 = N + 1.0;
  const double p1 = std::pow(N / n1, p), p2 = p / n1 * std::pow(N / n1, p - 1), p3 = 1.0 - p1 - p2;
  // columns: log Z_{N+1}, log Z_ideal, log Z_N, log Z_N split, log Z'_N
  std::vector<std::vector<double>> z(5, std::vector<double>(n_disorder));
  parallel_for(n_disorder, threads, [&](std::size_t i) {
    const std::uint64_t s = seed_child(seed, i);
    Rng rng(s);
    const double u1 = rng.uniform(), u2 = rng.uniform();
    const auto K1 = poisson_inverse(a * n1 * p1, u1), Kp = poisson_inverse(a * (N - p + 1), u1);
    const auto K2 = poisson_inverse(a * n1 * p2, u2), Kh = poisson_inverse(a * p, u2);
    const auto K3 = rng.poisson(a * n1 * p3);
    const auto Kb = rng.poisson(a * (p - 1));
    ClauseSet tr, id, base, full;
    tr.N = id.N = N + 1;
    base.N = full.N = N;
    const std::uint64_t g1 = seed_child(s, 1), g2 = seed_child(s, 2), g3 = seed_child(s, 3), g4 = seed_child(s, 4);
    for (std::uint64_t k = 0; k < std::max(K1, Kp); ++k) {
      Clause c = cavity_clause(spec, seed_child(g1, k), N, 0u);
      if (k < K1) tr.clauses.push_back(c);
      if (k < Kp) id.clauses.push_back(c);
    }
    base.clauses = id.clauses;
    full.clauses = id.clauses;
    for (std::uint64_t k = 0; k < std::max(K2, Kh); ++k) {
      Clause c = cavity_clause(spec, seed_child(g2, k), N, 1u);
      if (k < K2) tr.clauses.push_back(c);
      if (k < Kh) id.clauses.push_back(c);
    }
    for (std::uint64_t k = 0; k < K3; ++k) {
      // uniform tuple conditioned on at least two copies of the cavity site
      Rng r(seed_child(g3, k));
      unsigned at;
      do {
        at = 0;
        for (int j = 0; j < p; ++j)
          if (r.uniform() * n1 >= N) at |= 1u << j;
      } while (std::popcount(at) < 2);
      tr.clauses.push_back(cavity_clause(spec, r.bits(), N, at));
    }
    // Poisson(aN) = Poisson(a(N-p+1)) + Poisson(a(p-1)) exactly
    for (std::uint64_t k = 0; k < Kb; ++k) full.clauses.push_back(cavity_clause(spec, seed_child(g4, k), N, 0u));
    z[0][i] = log_partition(tr);
    z[1][i] = log_partition(id);
    z[2][i] = log_partition(full);
    z[3][i] = z[2][i];
    z[4][i] = log_partition(base);
  });
  auto col = [&](int x, int y) {
    std::vector<double> d(n_disorder);
    for (int i = 0; i < n_disorder; ++i) d[i] = z[x][i] - z[y][i];
    return mean_estimate(d, seed);
  };
  CavityCheck out;
  // both sides share Z'_N, so the residual is the paired difference
  out.first = {col(0, 4), col(1, 4), col(0, 1)};
  out.second = {col(2, 4), col(3, 4), col(2, 3)};
  return out;
}

}  // namespace sglab
