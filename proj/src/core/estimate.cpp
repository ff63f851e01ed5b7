#include "core/estimate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "core/parallel.hpp"

namespace sglab {

// ---- local model ----

struct LocalModel::Impl {
  int N = 0;
  // diluted
  const ClauseSet* cs = nullptr;
  std::vector<std::vector<int>> clauses_at, blocks_at;
  // SK
  const SKDisorder* sk = nullptr;
  bool quad = false;
  std::vector<double> K, h;

  static unsigned arg_index(const Clause& c, std::uint64_t s, int offset) {
    unsigned idx = 0;
    for (std::size_t j = 0; j < c.idx.size(); ++j)
      if (s >> c.idx[j] & 1u) idx |= 1u << (j + offset);
    return idx;
  }
  double block_term(const std::vector<Clause>& blk, std::uint64_t s) const {
    double sp = 0.0, sm = 0.0;
    for (const auto& t : blk) {
      unsigned rest = arg_index(t, s, 1);
      sp += t.theta(rest | 1u);
      sm += t.theta(rest);
    }
    double m = std::max(sp, sm);
    return m + std::log(0.5 * (std::exp(sp - m) + std::exp(sm - m)));
  }
};

LocalModel::LocalModel(const ClauseSet& cs) : impl_(std::make_unique<Impl>()) {
  if (cs.N < 1 || cs.N > kMaxChainN)
    throw Error(ErrorCode::limit, "chains support 1 <= N <= " + std::to_string(kMaxChainN), "params.N");
  impl_->N = cs.N;
  impl_->cs = &cs;
  impl_->clauses_at.resize(cs.N);
  impl_->blocks_at.resize(cs.N);
  for (std::size_t k = 0; k < cs.clauses.size(); ++k) {
    auto idx = cs.clauses[k].idx;
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (int i : idx) impl_->clauses_at.at(i).push_back(static_cast<int>(k));
  }
  for (std::size_t l = 0; l < cs.blocks.size(); ++l) {
    std::vector<int> idx;
    for (const auto& t : cs.blocks[l]) idx.insert(idx.end(), t.idx.begin(), t.idx.end());
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (int i : idx) impl_->blocks_at.at(i).push_back(static_cast<int>(l));
  }
}

LocalModel::LocalModel(const SKDisorder& d) : impl_(std::make_unique<Impl>()) {
  if (d.N < 1 || d.N > kMaxChainN)
    throw Error(ErrorCode::limit, "chains support 1 <= N <= " + std::to_string(kMaxChainN), "params.N");
  impl_->N = d.N;
  impl_->sk = &d;
  impl_->quad = d.quadratic();
  if (impl_->quad) {
    std::vector<double> J;
    double c;
    d.quadratic_form(J, impl_->h, c);
    const int N = d.N;
    impl_->K.assign(static_cast<std::size_t>(N) * N, 0.0);
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) impl_->K[i * N + j] = impl_->K[j * N + i] = J[i * N + j];
  }
}

LocalModel::~LocalModel() = default;
LocalModel::LocalModel(LocalModel&&) noexcept = default;

int LocalModel::N() const { return impl_->N; }

double LocalModel::log_weight(std::uint64_t s) const {
  if (impl_->cs) return impl_->cs->log_weight(s);
  return impl_->sk->log_weight(SpinConfig::from_index(s, impl_->N));
}

double LocalModel::flip_delta(std::uint64_t s, int i) const {
  const Impl& m = *impl_;
  const std::uint64_t t = s ^ (1ULL << i);
  if (m.cs) {
    double d = 0.0;
    for (int k : m.clauses_at[i]) {
      const auto& c = m.cs->clauses[k];
      d += c.theta(Impl::arg_index(c, t, 0)) - c.theta(Impl::arg_index(c, s, 0));
    }
    for (int l : m.blocks_at[i]) d += m.block_term(m.cs->blocks[l], t) - m.block_term(m.cs->blocks[l], s);
    return d;
  }
  if (m.quad) {
    double f = m.h[i];
    const double* row = &m.K[static_cast<std::size_t>(i) * m.N];
    for (int j = 0; j < m.N; ++j) f += row[j] * spin_of(s, j);
    return -2.0 * spin_of(s, i) * f;
  }
  return log_weight(t) - log_weight(s);
}

// ---- chains ----

void ChainConfig::validate() const {
  if (burn_in < 0 || burn_in >= sweeps) throw Error(ErrorCode::invalid_argument, "need 0 <= burn_in < sweeps", "mc.chain.burn_in");
  if (thinning < 1) throw Error(ErrorCode::invalid_argument, "thinning must be >= 1", "mc.chain.thinning");
  if (n_replicas < 1) throw Error(ErrorCode::invalid_argument, "n_replicas must be >= 1", "mc.chain.n_replicas");
}

ChainSamples mcmc_sample(const LocalModel& model, const ChainConfig& chain, std::uint64_t seed, int threads) {
  chain.validate();
  const int N = model.N();
  ChainSamples out;
  out.N = N;
  out.replicas.resize(chain.n_replicas);
  parallel_for(chain.n_replicas, threads, [&](std::size_t r) {
    Rng rng(seed_child(seed, r));
    std::uint64_t s = 0;
    for (int i = 0; i < N; ++i)
      if (rng.sign() > 0) s |= 1ULL << i;
    auto& keep = out.replicas[r];
    keep.reserve(chain.retained());
    for (int sweep = 0; sweep < chain.sweeps; ++sweep) {
      for (int step = 0; step < N; ++step) {
        const int i = chain.kernel == ChainConfig::Kernel::glauber ? step : static_cast<int>(rng.index(N));
        const double d = model.flip_delta(s, i);
        const double u = rng.uniform();
        bool flip;
        if (chain.kernel == ChainConfig::Kernel::glauber)
          flip = u < 1.0 / (1.0 + std::exp(-d));
        else
          flip = d >= 0.0 || u < std::exp(d);
        if (flip) s ^= 1ULL << i;
      }
      if (sweep >= chain.burn_in && (sweep - chain.burn_in + 1) % chain.thinning == 0) keep.push_back(s);
    }
  });
  return out;
}

double multioverlap_of(std::span<const std::uint64_t> configs, int N) {
  // spin product is -1 where an odd number of replicas hold -1
  std::uint64_t odd = 0;
  for (auto c : configs) odd ^= ~c;
  if (N < 64) odd &= (1ULL << N) - 1;
  return static_cast<double>(N - 2 * std::popcount(odd)) / N;
}

// ---- disorder-averaged quantities ----

namespace {

constexpr int kMaxExactN = 16;

// Draws i.i.d. replicas from one disorder realization.
class ReplicaSource {
 public:
  template <class Disorder>
  ReplicaSource(const Disorder& dis, const LocalModel& model, const EstimateParams& mc, int n_rep, int tuples,
                std::uint64_t seed)
      : N_(model.N()), rng_(seed_child(seed, 1)) {
    if (!mc.use_chain && N_ <= kMaxExactN) {
      table_ = enumerate_gibbs(dis);
      cdf_ = table_.cdf();
    } else {
      ChainConfig c = mc.chain;
      c.n_replicas = n_rep;
      chains_ = mcmc_sample(model, c, seed_child(seed, 2), 1);
      if (static_cast<int>(chains_.replicas[0].size()) < 1)
        throw Error(ErrorCode::invalid_argument, "chain retains no samples", "mc.chain");
    }
    tuples_ = exact() ? tuples : static_cast<int>(chains_.replicas[0].size());
  }
  bool exact() const { return !cdf_.empty(); }
  int tuples() const { return tuples_; }
  const GibbsTable& table() const { return table_; }
  // replica l of tuple t
  std::uint64_t draw(int t, int l) {
    if (!exact()) return chains_.replicas[l][t];
    double u = rng_.uniform();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::uint64_t>(it - cdf_.begin());
  }

 private:
  int N_;
  Rng rng_;
  GibbsTable table_;
  std::vector<double> cdf_;
  ChainSamples chains_;
  int tuples_ = 0;
};

void check_params(const EstimateParams& mc, int N) {
  if (mc.n_disorder < 2) throw Error(ErrorCode::invalid_argument, "n_disorder must be >= 2", "mc.n_disorder");
  if (mc.samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1", "mc.samples");
  if (N < 1 || N > kMaxChainN) throw Error(ErrorCode::limit, "N out of range", "params.N");
  if (mc.use_chain || N > kMaxExactN) mc.chain.validate();
}

template <class Sampler>
std::vector<Estimate> moments_impl(int N, const std::vector<MomentRequest>& req, const EstimateParams& mc,
                                   std::uint64_t seed, Sampler&& sample) {
  check_params(mc, N);
  int n_rep = 1;
  for (const auto& r : req)
    for (auto [site, rep] : r) {
      if (site < 0 || site >= N || rep < 0) throw Error(ErrorCode::invalid_argument, "bad moment request", "params.request");
      n_rep = std::max(n_rep, rep + 1);
    }
  std::vector<std::vector<double>> cols(req.size(), std::vector<double>(mc.n_disorder));
  parallel_for(mc.n_disorder, mc.threads, [&](std::size_t d) {
    const std::uint64_t s = seed_child(seed, d);
    auto holder = sample(seed_child(s, 0));
    LocalModel model(holder);
    ReplicaSource src(holder, model, mc, n_rep, 0, s);
    for (std::size_t q = 0; q < req.size(); ++q) {
      // parity mask of sites per replica
      std::vector<std::uint64_t> mask(n_rep, 0);
      for (auto [site, rep] : req[q]) mask[rep] ^= 1ULL << site;
      if (src.exact()) {
        double v = 1.0;
        for (int l = 0; l < n_rep; ++l) {
          if (!mask[l]) continue;
          const std::uint64_t m = mask[l];
          v *= src.table().average([m](std::uint64_t c) { return (std::popcount(~c & m) & 1) ? -1.0 : 1.0; });
        }
        cols[q][d] = v;
      } else {
        double acc = 0.0;
        for (int t = 0; t < src.tuples(); ++t) {
          double v = 1.0;
          for (int l = 0; l < n_rep; ++l)
            if (std::popcount(~src.draw(t, l) & mask[l]) & 1) v = -v;
          acc += v;
        }
        cols[q][d] = acc / src.tuples();
      }
    }
  });
  std::vector<Estimate> out;
  for (auto& c : cols) out.push_back(mean_estimate(c, seed));
  return out;
}

template <class Sampler>
Estimate multioverlap_impl(int N, const std::vector<std::vector<int>>& pattern, const EstimateParams& mc,
                           std::uint64_t seed, Sampler&& sample) {
  check_params(mc, N);
  if (pattern.empty()) throw Error(ErrorCode::invalid_argument, "empty pattern", "params.pattern");
  int L = 0;
  for (const auto& t : pattern) {
    if (t.empty()) throw Error(ErrorCode::invalid_argument, "tuples need n >= 1", "params.pattern");
    for (int l : t) {
      if (l < 1) throw Error(ErrorCode::invalid_argument, "replica labels are 1-based", "params.pattern");
      L = std::max(L, l);
    }
  }
  std::vector<double> col(mc.n_disorder);
  parallel_for(mc.n_disorder, mc.threads, [&](std::size_t d) {
    const std::uint64_t s = seed_child(seed, d);
    auto holder = sample(seed_child(s, 0));
    LocalModel model(holder);
    ReplicaSource src(holder, model, mc, L, mc.samples, s);
    std::vector<std::uint64_t> rep(L + 1), sel;
    double acc = 0.0;
    for (int t = 0; t < src.tuples(); ++t) {
      for (int l = 1; l <= L; ++l) rep[l] = src.draw(t, l - 1);
      double v = 1.0;
      for (const auto& tup : pattern) {
        sel.clear();
        for (int l : tup) sel.push_back(rep[l]);
        v *= multioverlap_of(sel, N);
      }
      acc += v;
    }
    col[d] = acc / src.tuples();
  });
  return mean_estimate(col, seed);
}

}  // namespace

std::vector<Estimate> annealed_moments(const DilutedSpec& spec, int N, const std::vector<MomentRequest>& req,
                                       const EstimateParams& mc, std::uint64_t seed) {
  spec.validate();
  return moments_impl(N, req, mc, seed, [&](std::uint64_t s) { return sample_diluted_disorder(spec, N, s); });
}

std::vector<Estimate> annealed_moments(const SKSpec& spec, int N, const std::vector<MomentRequest>& req,
                                       const EstimateParams& mc, std::uint64_t seed) {
  spec.validate();
  return moments_impl(N, req, mc, seed, [&](std::uint64_t s) { return sample_sk_disorder(spec, N, s); });
}

Estimate multioverlap_N(const DilutedSpec& spec, int N, const std::vector<std::vector<int>>& pattern,
                        const EstimateParams& mc, std::uint64_t seed) {
  spec.validate();
  return multioverlap_impl(N, pattern, mc, seed, [&](std::uint64_t s) { return sample_diluted_disorder(spec, N, s); });
}

Estimate multioverlap_N(const SKSpec& spec, int N, const std::vector<std::vector<int>>& pattern,
                        const EstimateParams& mc, std::uint64_t seed) {
  spec.validate();
  return multioverlap_impl(N, pattern, mc, seed, [&](std::uint64_t s) { return sample_sk_disorder(spec, N, s); });
}

GGFinite gg_finite_N(const SKSpec& spec, const std::vector<int>& Ns, int p, int n, const OverlapFunction& F,
                     const EstimateParams& mc, std::uint64_t seed) {
  if (!spec.gg) throw Error(ErrorCode::config, "finite-N GG needs the gg perturbation", "model.gg");
  if (p < 1) throw Error(ErrorCode::invalid_argument, "p must be >= 1", "params.p");
  if (n < 2) throw Error(ErrorCode::invalid_argument, "n must be >= 2", "params.n");
  if (Ns.empty()) throw Error(ErrorCode::invalid_argument, "need at least one N", "params.N");
  GGFinite out;
  SKSpec s = spec;
  if (s.gg->beta_N.empty()) {
    Rng r(seed_derive(seed, {"beta_N"}));
    for (int q : {1, 2}) s.gg->beta_N.push_back({q, (2.0 * r.uniform() - 1.0) * std::ldexp(1.0, -q)});
  }
  s.validate();
  out.beta_N = s.gg->beta_N;
  const std::uint64_t dseed = seed_derive(seed, {"disorder"});
  for (int N : Ns) {
    check_params(mc, N);
    std::vector<std::vector<double>> cols(4, std::vector<double>(mc.n_disorder));
    parallel_for(mc.n_disorder, mc.threads, [&](std::size_t d) {
      const std::uint64_t ds = seed_child(dseed, d);  // same index across N
      SKDisorder dis = sample_sk_disorder(s, N, seed_child(ds, 0));
      LocalModel model(dis);
      ReplicaSource src(dis, model, mc, n + 1, mc.samples, seed_child(ds, static_cast<std::uint64_t>(N)));
      std::vector<std::uint64_t> rep(n + 1);
      std::vector<double> R(static_cast<std::size_t>(n) * n);
      double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
      for (int t = 0; t < src.tuples(); ++t) {
        for (int l = 0; l <= n; ++l) rep[l] = src.draw(t, l);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            std::uint64_t pair[2] = {rep[a], rep[b]};
            R[a * n + b] = multioverlap_of(pair, N);
          }
        std::uint64_t last[2] = {rep[0], rep[n]};
        const double f = F(R, n);
        c0 += f * std::pow(multioverlap_of(last, N), p);
        c1 += f;
        c2 += std::pow(R[1], p);
        double sl = 0.0;
        for (int l = 1; l < n; ++l) sl += f * std::pow(R[l], p);
        c3 += sl;
      }
      const double T = src.tuples();
      cols[0][d] = c0 / T;
      cols[1][d] = c1 / T;
      cols[2][d] = c2 / T;
      cols[3][d] = c3 / T;
    });
    const double nn = n;
    GGFiniteRow row;
    row.N = N;
    row.residual = delta_estimate(
        cols, [nn](std::span<const double> m) { return m[0] - m[1] * m[2] / nn - m[3] / nn; }, seed);
    out.rows.push_back(row);
  }
  const auto& a = out.rows.front().residual;
  const auto& b = out.rows.back().residual;
  out.monotone = std::abs(b.value) <= std::abs(a.value) + 3.0 * std::hypot(a.se, b.se);
  return out;
}

}  // namespace sglab
