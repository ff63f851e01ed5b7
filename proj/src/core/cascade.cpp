#include "core/cascade.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"

namespace sglab {

void CascadeSpec::validate() const {
  const int K = k();
  if (K < 1) throw Error(ErrorCode::invalid_argument, "cascade needs at least one level", "sigma.q");
  if (static_cast<int>(m.size()) != K)
    throw Error(ErrorCode::invalid_argument, "q and m must have the same length", "sigma.m");
  if (truncation < 2) throw Error(ErrorCode::invalid_argument, "truncation M must be >= 2", "sigma.truncation");
  if (dust_chains < 1) throw Error(ErrorCode::invalid_argument, "dust_chains must be >= 1", "sigma.dust_chains");
  if (m[0] != 0.0) throw Error(ErrorCode::invalid_argument, "m_1 must be 0", "sigma.m");
  for (int l = 0; l < K; ++l) {
    if (!(q[l] >= 0.0 && q[l] <= 1.0)) throw Error(ErrorCode::invalid_argument, "q must lie in [0,1]", "sigma.q");
    if (l > 0 && !(q[l] > q[l - 1]))
      throw Error(ErrorCode::invalid_argument, "q must be strictly increasing", "sigma.q");
    if (l > 0 && !(m[l] > m[l - 1]))
      throw Error(ErrorCode::invalid_argument, "m must be strictly increasing", "sigma.m");
    if (!(m[l] < 1.0)) throw Error(ErrorCode::invalid_argument, "m must be < 1", "sigma.m");
  }
}

CascadeSpec CascadeSpec::with_truncation(int M) const {
  CascadeSpec s = *this;
  s.truncation = M;
  return s;
}

int CascadeRealization::lca_depth(std::size_t a, std::size_t b) const {
  if (a == b) return self_depth[a];
  for (int d = k; d >= 1; --d)
    if (ancestor(a, d) == ancestor(b, d)) return d;
  return 1;  // level 1 holds a single node
}

std::size_t CascadeRealization::sample_replica(Rng& rng) const {
  double u = rng.uniform() * cum_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<std::size_t>(it - cum_.begin());
}

void CascadeRealization::finalize() {
  const std::size_t L = leaves.size();
  anc_.assign(L * (k + 1), 0);
  weights.resize(L);
  self_depth.assign(L, k);
  for (std::size_t a = 0; a < L; ++a) {
    int node = leaves[a];
    weights[a] = subtree_weight[node];
    for (int d = k; d >= 0; --d) {
      anc_[a * (k + 1) + d] = node;
      if (dust[node] && (node == 0 || !dust[parent[node]])) self_depth[a] = d - 1;
      node = parent[node];
    }
  }
  cum_.resize(L);
  double s = 0.0;
  for (std::size_t a = 0; a < L; ++a) cum_[a] = (s += weights[a]);
}

std::vector<double> CascadeRealization::level_sums(const std::function<double(int)>& f) const {
  std::vector<double> fv(k + 1);
  for (int l = 1; l <= k; ++l) fv[l] = f(l);
  std::vector<double> out(leaves.size());
  for (std::size_t a = 0; a < leaves.size(); ++a) {
    double s = 0.0;
    for (int d = 1; d <= k; ++d) {
      double below = d < k ? subtree_weight[ancestor(a, d + 1)] : 0.0;
      s += fv[std::min(d, self_depth[a])] * (subtree_weight[ancestor(a, d)] - below);
    }
    out[a] = s;
  }
  return out;
}

namespace {

double gamma_draw(double a, Rng& rng) {
  double boost = 1.0;
  if (a < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / a);
    a += 1.0;
  }
  // Marsaglia-Tsang
  const double d = a - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    if (std::log(rng.uniform()) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * boost;
  }
}

// log of int_0^a x e^{-lam x} m x^{-m-1} dx
double log_thinned_tail(double m, double log_lam, double log_a) {
  const double s = 1.0 - m;
  const double log_x = log_lam + log_a;
  double log_g;
  if (log_x > std::log(60.0)) {
    log_g = std::lgamma(s);
  } else {
    const double x = std::exp(log_x);
    double term = 1.0 / s, sum = term;
    for (int n = 1; n < 1000 && term > 1e-17 * sum; ++n) sum += (term *= x / (s + n));
    log_g = s * log_x - x + std::log(sum);
  }
  return std::log(m) + (m - 1.0) * log_lam + log_g;
}

double lse2(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Top M points (log sizes, decreasing) of the stable(m) point process whose law
// is tilted by (total)^beta, and the log of the remaining mass. Uses
// tau^beta ~ int (1 - e^{-lam tau}) lam^{-1-beta} dlam: lam is drawn from its
// marginal, then the configuration given lam.
void tilted_points(double m, double beta, int M, Rng& rng, std::vector<double>& logx, double& log_tail) {
  const double g = beta / m;
  // s = Gamma(1-m) lam^m has density ~ s^{-g-1} (1 - e^{-s})
  const double s = gamma_draw(1.0 - g, rng) * std::pow(rng.uniform(), -1.0 / g);
  const double log_lam = (std::log(s) - std::lgamma(1.0 - m)) / m;
  if (s > 1.0) {
    // accept with probability 1 - e^{-lam tau}, at least 1 - e^{-1} on average
    for (;;) {
      double G = 0.0;
      for (int j = 0; j < M; ++j) {
        G += rng.exponential();
        logx[j] = -std::log(G) / m;
      }
      log_tail = (1.0 - 1.0 / m) * std::log(G) - std::log(1.0 / m - 1.0);
      double lt = log_tail;
      for (int j = 0; j < M; ++j) lt = lse2(lt, logx[j]);
      if (rng.uniform() < -std::expm1(-std::exp(log_lam + lt))) return;
    }
  }
  // small lam: points marked by the lam-clock (at least one) plus unmarked ones
  std::vector<double> pts;
  const double u = std::exp(-s) - std::expm1(-s) * rng.uniform();
  const std::uint64_t K = std::max<std::uint64_t>(1, poisson_inverse(s, u));
  for (std::uint64_t k = 0; k < K; ++k)
    pts.push_back(std::log(gamma_draw(1.0 - m, rng)) - log_lam - std::log(rng.uniform()) / m);
  double G = 0.0, last = 0.0;
  for (int kept = 0; kept < M;) {
    G += rng.exponential();
    last = -std::log(G) / m;
    if (rng.uniform() < std::exp(-std::exp(log_lam + last))) {
      pts.push_back(last);
      ++kept;
    }
  }
  std::sort(pts.begin(), pts.end(), std::greater<>());
  log_tail = log_thinned_tail(m, log_lam, last);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j < static_cast<std::size_t>(M))
      logx[j] = pts[j];
    else
      log_tail = lse2(log_tail, pts[j]);
  }
}

}  // namespace

CascadeRealization sample_cascade(const CascadeSpec& spec, std::uint64_t seed) {
  spec.validate();
  CascadeRealization c;
  c.k = spec.k();
  c.q = spec.q;
  const int M = spec.truncation;
  const int J = spec.dust_chains;
  auto add = [&](int par, int d, double w, std::uint64_t key, bool dust) {
    c.parent.push_back(par);
    c.depth.push_back(d);
    c.subtree_weight.push_back(w);
    c.node_key.push_back(key);
    c.dust.push_back(dust ? 1 : 0);
  };
  add(-1, 0, 1.0, splitmix64(seed), false);
  std::vector<double> logx(M);
  for (std::size_t i = 0; i < c.parent.size(); ++i) {
    const int d = c.depth[i];
    if (d == c.k) {
      c.leaves.push_back(static_cast<int>(i));
      continue;
    }
    const double mw = spec.m[d];
    const double W = c.subtree_weight[i];
    const std::uint64_t key = c.node_key[i];
    if (c.dust[i] || mw == 0.0) {
      add(static_cast<int>(i), d + 1, W, seed_child(key, 0), c.dust[i] != 0);
      continue;
    }
    // top M points of PD(m) via arrival times, plus the expected tail mass. A
    // node that was itself picked at index m' > 0 has PD(m, -m') children.
    Rng rng(seed_child(key, 0x5eedULL));
    double log_tail;
    const double tilt = d >= 1 ? spec.m[d - 1] : 0.0;
    if (tilt > 0.0) {
      tilted_points(mw, tilt, M, rng, logx, log_tail);
    } else {
      double G = 0.0;
      for (int j = 0; j < M; ++j) {
        G += rng.exponential();
        logx[j] = -std::log(G) / mw;
      }
      log_tail = (1.0 - 1.0 / mw) * std::log(G) - std::log(1.0 / mw - 1.0);
    }
    double mx = std::max(logx[0], log_tail);
    double S = std::exp(log_tail - mx);
    for (int j = 0; j < M; ++j) S += std::exp(logx[j] - mx);
    for (int j = 0; j < M; ++j) add(static_cast<int>(i), d + 1, W * std::exp(logx[j] - mx) / S, seed_child(key, j + 1), false);
    const double dw = W * std::exp(log_tail - mx) / S / J;
    for (int j = 0; j < J; ++j) add(static_cast<int>(i), d + 1, dw, seed_child(key, (1ULL << 40) + j), true);
  }
  c.finalize();
  return c;
}

std::vector<double> level_variances(std::span<const double> q, const std::function<double(double)>& psi) {
  std::vector<double> v(q.size());
  double prev = 0.0;
  for (std::size_t l = 0; l < q.size(); ++l) {
    double cur = psi(q[l]);
    double inc = l == 0 ? cur : cur - prev;
    if (inc < -1e-12) throw Error(ErrorCode::invalid_argument, "field: negative psi increment");
    v[l] = std::max(inc, 0.0);
    prev = cur;
  }
  return v;
}

std::vector<double> sample_field_nodes(const CascadeRealization& c, std::span<const double> level_var,
                                       std::uint64_t seed) {
  require(static_cast<int>(level_var.size()) == c.k, "sample_field: need one variance per level");
  std::vector<double> sd(c.k);
  for (int l = 0; l < c.k; ++l) {
    require(level_var[l] >= 0.0, "sample_field: negative increment");
    sd[l] = std::sqrt(level_var[l]);
  }
  std::vector<double> val(c.parent.size(), 0.0);
  for (std::size_t i = 1; i < c.parent.size(); ++i) {
    const double s = sd[c.depth[i] - 1];
    val[i] = val[c.parent[i]];
    if (s > 0.0) {
      Rng r(seed_child(seed, c.node_key[i]));
      val[i] += s * r.normal();
    }
  }
  return val;
}

std::vector<double> sample_field(const CascadeRealization& c, std::span<const double> level_var, std::uint64_t seed) {
  auto nodes = sample_field_nodes(c, level_var, seed);
  std::vector<double> out(c.leaves.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = nodes[c.leaves[a]];
  return out;
}

std::vector<double> tilt_weights(std::span<const double> w, std::span<const double> h) {
  require(w.size() == h.size(), "tilt_weights: size mismatch");
  std::vector<double> out(w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    require(h[i] >= 0.0 && std::isfinite(h[i]), "tilt_weights: factors must be finite and nonnegative");
    out[i] = w[i] * h[i];
    s += out[i];
  }
  require(s > 0.0, "tilt_weights: all factors vanish");
  for (auto& x : out) x /= s;
  return out;
}

std::vector<double> tilt_weights_log(std::span<const double> w, std::span<const double> log_h) {
  require(w.size() == log_h.size(), "tilt_weights: size mismatch");
  double mx = -INFINITY;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) mx = std::max(mx, log_h[i]);
  require(std::isfinite(mx), "tilt_weights: all factors vanish");
  std::vector<double> out(w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = w[i] > 0.0 ? w[i] * std::exp(log_h[i] - mx) : 0.0;
    s += out[i];
  }
  for (auto& x : out) x /= s;
  return out;
}

namespace {
double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
double triple(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}
}  // namespace

Estimate gg_on_cascade(const CascadeSpec& spec, int p, int n, GGFunction F, const McParams& mc, std::uint64_t seed) {
  spec.validate();
  require(n >= 2, "gg_on_cascade: n must be >= 2");
  require(p >= 1, "gg_on_cascade: p must be >= 1");
  require(F.r12_power >= 0, "gg_on_cascade: F power must be >= 0");
  const int a = F.r12_power;
  std::vector<std::vector<double>> cols(4, std::vector<double>(mc.outer));
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto c = sample_cascade(spec, seed_child(seed, i));
    auto pw = [&](int e) { return c.level_sums([&](int l) { return std::pow(c.q[l - 1], e); }); };
    auto Fa = pw(a), Fp = pw(p), Fap = pw(a + p);
    const auto& w = c.weights;
    double s2p = dot(w, Fp), s2a = dot(w, Fa), s2ap = dot(w, Fap), s3 = triple(w, Fa, Fp);
    cols[0][i] = s3;                       // <F R_{1,n+1}^p>
    cols[1][i] = s2a;                      // <F>
    cols[2][i] = s2p;                      // <R_12^p>
    cols[3][i] = s2ap + (n - 2) * s3;      // sum_{l=2..n} <F R_{1l}^p>
  });
  const double nn = n;
  return delta_estimate(
      cols, [nn](std::span<const double> m) { return m[0] - m[1] * m[2] / nn - m[3] / nn; }, seed);
}

Estimate gg_on_cascade_sampled(const CascadeSpec& spec, int p, int n,
                               const std::function<double(std::span<const double>, int)>& F, const McParams& mc,
                               std::uint64_t seed) {
  spec.validate();
  require(n >= 2, "gg_on_cascade: n must be >= 2");
  require(mc.inner >= 1, "gg_on_cascade: inner must be >= 1");
  std::vector<std::vector<double>> cols(4, std::vector<double>(mc.outer));
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto c = sample_cascade(spec, seed_child(seed, i));
    Rng rng(seed_child(seed_child(seed, i), 1));
    std::vector<std::size_t> rep(n + 1);
    std::vector<double> R(n * n);
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (int t = 0; t < mc.inner; ++t) {
      for (auto& r : rep) r = c.sample_replica(rng);
      // replicas are distinct even when they share a leaf
      auto ov = [&](int x, int y) { return x == y ? c.q.back() : c.overlap(rep[x], rep[y]); };
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) R[x * n + y] = ov(x, y);
      double f = F(R, n);
      s0 += f * std::pow(ov(0, n), p);
      s1 += f;
      s2 += std::pow(ov(0, 1), p);
      for (int l = 1; l < n; ++l) s3 += f * std::pow(ov(0, l), p);
    }
    const double K = mc.inner;
    cols[0][i] = s0 / K;
    cols[1][i] = s1 / K;
    cols[2][i] = s2 / K;
    cols[3][i] = s3 / K;
  });
  const double nn = n;
  return delta_estimate(
      cols, [nn](std::span<const double> m) { return m[0] - m[1] * m[2] / nn - m[3] / nn; }, seed);
}

OverlapLaw overlap_law(const CascadeSpec& spec, const McParams& mc, std::uint64_t seed) {
  spec.validate();
  const int K = spec.k();
  std::vector<std::vector<double>> probs(K, std::vector<double>(mc.outer));
  std::vector<std::int64_t> viol(mc.outer, 0);
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto c = sample_cascade(spec, seed_child(seed, i));
    for (int l = 1; l <= K; ++l) probs[l - 1][i] = dot(c.weights, c.level_sums([l](int j) { return j == l ? 1.0 : 0.0; }));
    Rng rng(seed_child(seed_child(seed, i), 2));
    for (int t = 0; t < mc.inner; ++t) {
      auto a = c.sample_replica(rng), b = c.sample_replica(rng), g = c.sample_replica(rng);
      if (c.overlap(b, g) < std::min(c.overlap(a, b), c.overlap(a, g))) ++viol[i];
    }
  });
  OverlapLaw out;
  for (int l = 0; l < K; ++l) out.prob.push_back(mean_estimate(probs[l], seed));
  for (auto v : viol) out.ultrametric_violations += v;
  out.triples_checked = static_cast<std::int64_t>(mc.outer) * mc.inner;
  return out;
}

}  // namespace sglab
