#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/parallel.hpp"

namespace sglab {

// ---- spins ----

SpinConfig::SpinConfig(std::vector<std::int8_t> s) : spins(std::move(s)) {
  require(!spins.empty(), "SpinConfig: length must be at least 1");
  for (auto v : spins) require(v == 1 || v == -1, "SpinConfig: entries must be -1 or +1");
}

SpinConfig SpinConfig::from_index(std::uint64_t i, int N) {
  require(N >= 1 && N <= 63, "SpinConfig: N out of range");
  std::vector<std::int8_t> s(N);
  for (int b = 0; b < N; ++b) s[b] = ((i >> b) & 1ULL) ? 1 : -1;
  return SpinConfig(std::move(s));
}

std::uint64_t SpinConfig::index() const {
  require(spins.size() <= 63, "SpinConfig: too long to index");
  std::uint64_t i = 0;
  for (std::size_t b = 0; b < spins.size(); ++b)
    if (spins[b] > 0) i |= 1ULL << b;
  return i;
}

// ---- theta ----

ThetaFamily ThetaFamily::pspin(int p, double beta, JLaw law) {
  ThetaFamily f;
  f.kind = Kind::pspin;
  f.p = p;
  f.beta = beta;
  f.jlaw = law;
  return f;
}

ThetaFamily ThetaFamily::ksat(int p, double beta) {
  ThetaFamily f;
  f.kind = Kind::ksat;
  f.p = p;
  f.beta = beta;
  return f;
}

ThetaDraw draw_theta(const ThetaFamily& fam, Rng& rng) {
  const int p = fam.p;
  const unsigned n = 1u << p;
  ThetaDraw d;
  d.p = p;
  d.table.resize(n);
  switch (fam.kind) {
    case ThetaFamily::Kind::pspin: {
      double J = 1.0;
      if (fam.jlaw == JLaw::rademacher) J = rng.sign();
      else if (fam.jlaw == JLaw::gaussian) J = rng.normal();
      double bj = fam.beta * J;
      d.a = std::cosh(bj);
      d.b = std::tanh(bj);
      d.fprod_max = 1.0;
      for (unsigned idx = 0; idx < n; ++idx) {
        int minus = p - std::popcount(idx);
        d.table[idx] = (minus % 2 == 0) ? bj : -bj;
      }
      break;
    }
    case ThetaFamily::Kind::ksat: {
      // clause violated only when every literal agrees with J_l sigma_l = +1
      unsigned want = 0;
      for (int l = 0; l < p; ++l)
        if (rng.sign() > 0) want |= 1u << l;
      d.a = 1.0;
      d.b = std::expm1(-fam.beta);
      d.fprod_max = 1.0;
      for (unsigned idx = 0; idx < n; ++idx) d.table[idx] = (idx == want) ? -fam.beta : 0.0;
      break;
    }
    case ThetaFamily::Kind::custom: {
      require(!fam.custom.empty(), "custom theta: no draws configured");
      const auto& c = fam.custom[rng.index(fam.custom.size())];
      require(static_cast<int>(c.f.size()) == p, "custom theta: f must have p entries");
      d.a = c.a;
      d.b = c.b;
      require(std::isfinite(c.a) && c.a > 0.0 && std::isfinite(c.b), "custom theta: a, b must be finite, a > 0");
      for (unsigned idx = 0; idx < n; ++idx) {
        double prod = 1.0;
        for (int j = 0; j < p; ++j) prod *= c.f[j][(idx >> j) & 1u];
        require(std::isfinite(prod), "custom theta: non-finite f entry");
        d.fprod_max = std::max(d.fprod_max, std::abs(prod));
        d.table[idx] = std::log(c.a) + std::log1p(c.b * prod);
      }
      break;
    }
  }
  return d;
}

ThetaReport validate_theta(const ThetaFamily& fam, int n_max, int samples, std::uint64_t seed) {
  require(n_max >= 1 && samples >= 1, "validate_theta: n_max and samples must be >= 1");
  require(fam.p >= 2 && is_even(fam.p), "validate_theta: p must be even and >= 2");
  ThetaReport rep;
  std::vector<Welford> mom(n_max);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    ThetaDraw d;
    try {
      d = draw_theta(fam, rng);
    } catch (const Error&) {
      rep.finite = false;
      break;
    }
    // b f1..fp with |f| products; pspin and ksat have |f| <= 1 and |b| < 1
    if (!(std::abs(d.b) * d.fprod_max < 1.0)) rep.bounded = false;
    for (double t : d.table)
      if (!std::isfinite(t)) rep.finite = false;
    double mb = -d.b, acc = 1.0;
    for (int n = 0; n < n_max; ++n) {
      acc *= mb;
      mom[n].add(acc);
    }
  }
  bool moments_ok = true;
  for (int n = 0; n < n_max; ++n) {
    Estimate e;
    e.value = mom[n].mean();
    e.se = mom[n].se();
    e.n = mom[n].count();
    e.seed = seed;
    rep.moments.push_back(e);
    if (e.value < -3.0 * e.se - 1e-15) moments_ok = false;
  }
  rep.ok = moments_ok && rep.bounded && rep.finite;
  return rep;
}

// ---- diluted ----

void DilutedSpec::validate() const {
  if (p < 2 || !is_even(p)) throw Error(ErrorCode::invalid_argument, "p must be an even integer >= 2", "model.p");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::invalid_argument, "alpha must be finite and >= 0", "model.alpha");
  if (theta.p != p) throw Error(ErrorCode::invalid_argument, "theta arity must equal p", "model.theta");
  if (!(theta.beta >= 0.0) || !std::isfinite(theta.beta))
    throw Error(ErrorCode::invalid_argument, "beta must be finite and >= 0", "model.theta.beta");
  if (p > 12) throw Error(ErrorCode::invalid_argument, "p too large", "model.p");
}

int DilutedSpec::c_N(int N) { return static_cast<int>(std::ceil(std::pow(static_cast<double>(N), 0.25))); }

namespace {
inline unsigned clause_index(const Clause& c, std::uint64_t config, unsigned shift) {
  unsigned idx = 0;
  for (std::size_t j = 0; j < c.idx.size(); ++j)
    idx |= static_cast<unsigned>((config >> c.idx[j]) & 1ULL) << (j + shift);
  return idx;
}
}  // namespace

double ClauseSet::log_weight(std::uint64_t config) const {
  double e = 0.0;
  for (const auto& c : clauses) e += c.theta(clause_index(c, config, 0));
  for (const auto& blk : blocks) {
    double sp = 0.0, sm = 0.0;
    for (const auto& t : blk) {
      unsigned rest = clause_index(t, config, 1);
      sp += t.theta(rest | 1u);
      sm += t.theta(rest);
    }
    double m = std::max(sp, sm);
    e += m + std::log(0.5 * (std::exp(sp - m) + std::exp(sm - m)));
  }
  return e;
}

double ClauseSet::log_weight(const SpinConfig& s) const {
  require(s.size() == N, "energy: configuration length differs from N");
  return log_weight(s.index());
}

ClauseSet sample_diluted_disorder(const DilutedSpec& spec, int N, std::uint64_t seed) {
  spec.validate();
  require(N >= 1, "sample_diluted_disorder: N must be >= 1");
  Rng rng(seed);
  ClauseSet cs;
  cs.N = N;
  auto K = rng.poisson(spec.alpha * N);
  cs.clauses.reserve(K);
  for (std::uint64_t k = 0; k < K; ++k) {
    Clause c;
    c.idx.resize(spec.p);
    for (auto& i : c.idx) i = static_cast<int>(rng.index(N));
    c.theta = draw_theta(spec.theta, rng);
    cs.clauses.push_back(std::move(c));
  }
  if (spec.perturbation) {
    int cN = DilutedSpec::c_N(N);
    require(cN <= N, "perturbation schedule exceeds N");
    auto B = rng.poisson(cN);
    for (std::uint64_t l = 0; l < B; ++l) {
      std::vector<Clause> blk;
      auto T = rng.poisson(spec.alpha * spec.p);
      for (std::uint64_t k = 0; k < T; ++k) {
        Clause c;
        c.idx.resize(spec.p - 1);
        for (auto& i : c.idx) i = static_cast<int>(rng.index(N));
        c.theta = draw_theta(spec.theta, rng);
        blk.push_back(std::move(c));
      }
      cs.blocks.push_back(std::move(blk));
    }
  }
  return cs;
}

double energy_diluted(const ClauseSet& cs, const SpinConfig& config) {
  for (const auto& c : cs.clauses)
    for (int i : c.idx) require(i >= 0 && i < cs.N, "energy_diluted: clause index out of range");
  for (const auto& blk : cs.blocks)
    for (const auto& c : blk)
      for (int i : c.idx) require(i >= 0 && i < cs.N, "energy_diluted: clause index out of range");
  return cs.log_weight(config);
}

// ---- SK ----

double SKSpec::xi(double x) const {
  double s = 0.0;
  for (auto [p, b] : betas) s += b * b * std::pow(x, p);
  return s;
}

double SKSpec::dxi(double x) const {
  double s = 0.0;
  for (auto [p, b] : betas) s += p * b * b * (p == 1 ? 1.0 : std::pow(x, p - 1));
  return s;
}

double SKSpec::theta(double x) const {
  double s = 0.0;
  for (auto [p, b] : betas) s += (p - 1) * b * b * std::pow(x, p);
  return s;
}

int SKSpec::max_p() const {
  int m = 0;
  for (auto [p, b] : betas) m = std::max(m, p);
  return m;
}

void SKSpec::validate() const {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    auto [p, b] = betas[i];
    std::string loc = "model.betas[" + std::to_string(i) + "]";
    if (!(p == 1 || (p >= 2 && is_even(p))))
      throw Error(ErrorCode::invalid_argument, "SK term p must be 1 or even", loc);
    if (p > 8) throw Error(ErrorCode::invalid_argument, "SK term p too large", loc);
    if (!std::isfinite(b)) throw Error(ErrorCode::invalid_argument, "beta_p must be finite", loc);
  }
  if (gg) {
    if (!(gg->delta_exponent >= 0.0))
      throw Error(ErrorCode::invalid_argument, "delta exponent must be >= 0", "model.gg.delta_exponent");
    for (auto [p, b] : gg->beta_N) {
      if (p != 1 && p != 2)
        throw Error(ErrorCode::invalid_argument, "gg perturbation supports p in {1,2}", "model.gg.beta_N");
      if (std::abs(b) > std::ldexp(1.0, -p))
        throw Error(ErrorCode::invalid_argument, "|beta_N,p| must be <= 2^-p", "model.gg.beta_N");
    }
  }
}

double SKTensor::eval(std::span<const std::int8_t> s) const {
  const std::size_t N = s.size();
  if (p == 0) return coef * g[0];
  if (p == 1) {
    double t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += g[i] * s[i];
    return coef * t;
  }
  if (p == 2) {
    double t = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double r = 0.0;
      const double* row = &g[i * N];
      for (std::size_t j = 0; j < N; ++j) r += row[j] * s[j];
      t += s[i] * r;
    }
    return coef * t;
  }
  // general p: contract the last index repeatedly
  std::vector<double> cur(g);
  std::size_t len = cur.size();
  for (int r = 0; r < p; ++r) {
    std::size_t outer = len / N;
    std::vector<double> next(outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      double acc = 0.0;
      for (std::size_t j = 0; j < N; ++j) acc += cur[o * N + j] * s[j];
      next[o] = acc;
    }
    cur.swap(next);
    len = outer;
  }
  return coef * cur[0];
}

namespace {
SKTensor gaussian_tensor(int p, double coef, int N, Rng& rng) {
  SKTensor t;
  t.p = p;
  t.coef = coef;
  std::size_t n = 1;
  for (int r = 0; r < p; ++r) n *= static_cast<std::size_t>(N);
  t.g.resize(n);
  for (auto& x : t.g) x = rng.normal();
  return t;
}
}  // namespace

double SKDisorder::log_weight(const SpinConfig& s) const {
  require(s.size() == N, "energy: configuration length differs from N");
  double e = 0.0;
  for (const auto& t : terms) e += t.eval(s.spins);
  for (const auto& proc : logch_terms) {
    double g = 0.0;
    for (const auto& t : proc) g += t.eval(s.spins);
    e += std::log(std::cosh(g));
  }
  for (const auto& proc : lin_terms)
    for (const auto& t : proc) e += t.eval(s.spins);
  return e;
}

bool SKDisorder::quadratic() const {
  if (!logch_terms.empty() || !lin_terms.empty()) return false;
  for (const auto& t : terms)
    if (t.p > 2) return false;
  return true;
}

void SKDisorder::quadratic_form(std::vector<double>& J, std::vector<double>& h, double& c) const {
  require(quadratic(), "quadratic_form: disorder is not quadratic");
  J.assign(static_cast<std::size_t>(N) * N, 0.0);
  h.assign(N, 0.0);
  c = 0.0;
  for (const auto& t : terms) {
    if (t.p == 1) {
      for (int i = 0; i < N; ++i) h[i] += t.coef * t.g[i];
    } else if (t.p == 2) {
      for (int i = 0; i < N; ++i) {
        c += t.coef * t.g[i * N + i];
        for (int j = i + 1; j < N; ++j) J[i * N + j] += t.coef * (t.g[i * N + j] + t.g[j * N + i]);
      }
    }
  }
}

SKDisorder sample_sk_disorder(const SKSpec& spec, int N, std::uint64_t seed) {
  spec.validate();
  require(N >= 1, "sample_sk_disorder: N must be >= 1");
  Rng rng(seed);
  SKDisorder d;
  d.N = N;
  const double n = static_cast<double>(N);
  for (auto [p, b] : spec.betas) d.terms.push_back(gaussian_tensor(p, b * std::pow(n, -(p - 1) / 2.0), N, rng));
  if (spec.gg) {
    double delta = std::pow(n, -spec.gg->delta_exponent);
    for (auto [p, b] : spec.gg->beta_N)
      d.terms.push_back(gaussian_tensor(p, delta * b * std::pow(n, -(p - 1) / 2.0), N, rng));
  }
  if (spec.perturbation) {
    int cN = DilutedSpec::c_N(N);
    auto K1 = rng.poisson(cN);
    for (std::uint64_t k = 0; k < K1; ++k) {
      // covariance xi'(R): p-1 spin factors with weight beta_p sqrt(p)
      std::vector<SKTensor> proc;
      for (auto [p, b] : spec.betas)
        proc.push_back(gaussian_tensor(p - 1, b * std::sqrt(static_cast<double>(p)) * std::pow(n, -(p - 1) / 2.0), N, rng));
      d.logch_terms.push_back(std::move(proc));
    }
    auto K2 = rng.poisson(cN);
    for (std::uint64_t k = 0; k < K2; ++k) {
      // covariance theta(R): p spin factors with weight beta_p sqrt(p-1)
      std::vector<SKTensor> proc;
      for (auto [p, b] : spec.betas)
        if (p > 1)
          proc.push_back(gaussian_tensor(p, b * std::sqrt(static_cast<double>(p - 1)) * std::pow(n, -p / 2.0), N, rng));
      d.lin_terms.push_back(std::move(proc));
    }
  }
  return d;
}

double energy_sk(const SKDisorder& d, const SpinConfig& config) { return d.log_weight(config); }

// ---- Gibbs ----

double GibbsTable::average(const std::function<double(std::uint64_t)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i)
    if (probabilities[i] > 0.0) s += probabilities[i] * f(i);
  return s;
}

std::vector<double> GibbsTable::cdf() const {
  std::vector<double> c(probabilities.size());
  std::partial_sum(probabilities.begin(), probabilities.end(), c.begin());
  return c;
}

std::uint64_t GibbsTable::sample(double u) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return probabilities.size() - 1;
}

namespace {
GibbsTable normalize(std::vector<double>&& logw, int N) {
  GibbsTable t;
  t.N = N;
  double m = *std::max_element(logw.begin(), logw.end());
  require(std::isfinite(m), "enumerate_gibbs: non-finite energy");
  double s = 0.0;
  for (auto& x : logw) {
    x = std::exp(x - m);
    s += x;
  }
  for (auto& x : logw) x /= s;
  t.log_Z = m + std::log(s);
  t.probabilities = std::move(logw);
  return t;
}

void check_enumerable(int N) {
  if (N < 1 || N > kMaxEnumerate)
    throw Error(ErrorCode::limit, "enumerate_gibbs: N must be in [1, " + std::to_string(kMaxEnumerate) + "]");
}

std::vector<double> quadratic_energies(const SKDisorder& d) {
  std::vector<double> J, h;
  double c;
  d.quadratic_form(J, h, c);
  const int N = d.N;
  // symmetric coupling matrix for local fields
  std::vector<double> K(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) K[i * N + j] = K[j * N + i] = J[i * N + j];
  std::vector<std::int8_t> s(N, -1);
  std::vector<double> field(N, 0.0);  // sum_j K_ij s_j
  double e = c;
  for (int i = 0; i < N; ++i) {
    e -= h[i];
    for (int j = 0; j < N; ++j) field[i] -= K[i * N + j];
  }
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) e += J[i * N + j];
  const std::uint64_t total = 1ULL << N;
  std::vector<double> out(total);
  std::uint64_t gray = 0;
  out[0] = e;
  for (std::uint64_t k = 1; k < total; ++k) {
    int i = std::countr_zero(k);
    gray ^= 1ULL << i;
    // flipping s_i changes -H by -2 s_i (h_i + field_i)
    e += -2.0 * s[i] * (h[i] + field[i]);
    s[i] = static_cast<std::int8_t>(-s[i]);
    for (int j = 0; j < N; ++j) field[j] += 2.0 * s[i] * K[j * N + i];
    out[gray] = e;
  }
  return out;
}
}  // namespace

GibbsTable enumerate_gibbs(const std::function<double(std::uint64_t)>& log_weight, int N) {
  check_enumerable(N);
  const std::uint64_t total = 1ULL << N;
  std::vector<double> lw(total);
  for (std::uint64_t i = 0; i < total; ++i) lw[i] = log_weight(i);
  return normalize(std::move(lw), N);
}

GibbsTable enumerate_gibbs(const ClauseSet& cs) {
  check_enumerable(cs.N);
  const std::uint64_t total = 1ULL << cs.N;
  std::vector<double> lw(total);
  for (std::uint64_t i = 0; i < total; ++i) lw[i] = cs.log_weight(i);
  return normalize(std::move(lw), cs.N);
}

GibbsTable enumerate_gibbs(const SKDisorder& d) {
  check_enumerable(d.N);
  if (d.quadratic()) return normalize(quadratic_energies(d), d.N);
  return enumerate_gibbs([&](std::uint64_t i) { return d.log_weight(SpinConfig::from_index(i, d.N)); }, d.N);
}

double log_partition(const ClauseSet& cs) { return enumerate_gibbs(cs).log_Z; }
double log_partition(const SKDisorder& d) { return enumerate_gibbs(d).log_Z; }

namespace {
template <class Draw>
Estimate quenched(int N, int n_disorder, std::uint64_t seed, int threads, Draw&& draw_logZ) {
  require(n_disorder >= 2, "free_energy_quenched: n_disorder must be >= 2");
  check_enumerable(N);
  std::vector<double> v(n_disorder);
  parallel_for(n_disorder, threads, [&](std::size_t i) { v[i] = draw_logZ(seed_child(seed, i)) / N; });
  return mean_estimate(v, seed);
}
}  // namespace

Estimate free_energy_quenched(const DilutedSpec& spec, int N, int n_disorder, std::uint64_t seed, int threads) {
  spec.validate();
  return quenched(N, n_disorder, seed, threads,
                  [&](std::uint64_t s) { return log_partition(sample_diluted_disorder(spec, N, s)); });
}

Estimate free_energy_quenched(const SKSpec& spec, int N, int n_disorder, std::uint64_t seed, int threads) {
  spec.validate();
  return quenched(N, n_disorder, seed, threads,
                  [&](std::uint64_t s) { return log_partition(sample_sk_disorder(spec, N, s)); });
}

}  // namespace sglab
