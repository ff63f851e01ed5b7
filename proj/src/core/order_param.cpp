#include "core/order_param.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/parallel.hpp"
#include "core/quadrature.hpp"

namespace sglab {

// ---- Parisi recursion ----

ParisiRecursion::ParisiRecursion(std::vector<double> m, std::vector<double> level_var, int gh_order)
    : m_(std::move(m)), var_(std::move(level_var)) {
  const int K = k();
  require(K >= 1 && static_cast<int>(var_.size()) == K, "ParisiRecursion: need one variance per level");
  double total = 0.0, smin = INFINITY;
  for (int l = 0; l < K; ++l) {
    require(var_[l] >= 0.0, "ParisiRecursion: negative variance");
    require(m_[l] >= 0.0 && m_[l] < 1.0, "ParisiRecursion: m must lie in [0,1)");
    total += var_[l];
    if (var_[l] > 0.0) smin = std::min(smin, std::sqrt(var_[l]));
  }
  L_ = 12.0 + 8.0 * std::sqrt(total);
  double dx = std::min(0.02, std::isfinite(smin) ? smin / 6.0 : 0.02);
  const int half = static_cast<int>(std::min(6000.0, std::ceil(L_ / dx)));
  G_ = 2 * half + 1;
  dx_ = L_ / half;

  const auto& gh = gauss_hermite(gh_order);
  const int H = static_cast<int>(gh.x.size());
  D_.assign(K + 1, std::vector<double>(G_));
  T_.assign(K + 1, std::vector<double>(G_));
  for (int j = 0; j < G_; ++j) {
    double x = -L_ + j * dx_;
    D_[K][j] = log_ch(x) - std::abs(x);
    T_[K][j] = std::tanh(x);
  }
  std::vector<double> lx(H);
  for (int l = K; l >= 1; --l) {
    const double s = std::sqrt(var_[l - 1]);
    const double ml = m_[l - 1];
    const auto& Dn = D_[l];
    const auto& Tn = T_[l];
    auto Xn = [&](double y) { return std::abs(y) + interp(Dn, y); };
    for (int j = 0; j < G_; ++j) {
      double x = -L_ + j * dx_;
      if (s == 0.0) {
        D_[l - 1][j] = Dn[j];
        T_[l - 1][j] = Tn[j];
        continue;
      }
      double Xp, tp = 0.0;
      if (ml == 0.0) {
        Xp = 0.0;
        for (int h = 0; h < H; ++h) {
          double y = x + s * gh.x[h];
          Xp += gh.w[h] * Xn(y);
          tp += gh.w[h] * interp(Tn, y);
        }
      } else {
        double mx = -INFINITY;
        for (int h = 0; h < H; ++h) {
          lx[h] = std::log(gh.w[h]) + ml * Xn(x + s * gh.x[h]);
          mx = std::max(mx, lx[h]);
        }
        double sum = 0.0;
        for (int h = 0; h < H; ++h) sum += std::exp(lx[h] - mx);
        double lse = mx + std::log(sum);
        Xp = lse / ml;
        for (int h = 0; h < H; ++h) tp += std::exp(lx[h] - lse) * interp(Tn, x + s * gh.x[h]);
      }
      D_[l - 1][j] = Xp - std::abs(x);
      T_[l - 1][j] = tp;
    }
  }
  dmax_.resize(K + 1);
  for (int l = 0; l <= K; ++l) dmax_[l] = *std::max_element(D_[l].begin(), D_[l].end());

  // forward law of the path values, level by level
  std::vector<double> P(G_, 0.0), Q(G_);
  P[half] = 1.0;
  qt_.resize(K);
  std::vector<double> row;
  for (int l = 1; l <= K; ++l) {
    const double s = std::sqrt(var_[l - 1]);
    const double ml = m_[l - 1];
    if (s > 0.0) {
      std::fill(Q.begin(), Q.end(), 0.0);
      const int win = static_cast<int>(std::ceil(9.0 * s / dx_));
      row.resize(2 * win + 1);
      for (int i = 0; i < G_; ++i) {
        if (P[i] < 1e-300) continue;
        int lo = std::max(0, i - win), hi = std::min(G_ - 1, i + win);
        double mx = -INFINITY;
        for (int j = lo; j <= hi; ++j) {
          double z = (j - i) * dx_ / s;
          double v = -0.5 * z * z + ml * (std::abs(-L_ + j * dx_) + D_[l][j]);
          row[j - lo] = v;
          mx = std::max(mx, v);
        }
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += (row[j - lo] = std::exp(row[j - lo] - mx));
        for (int j = lo; j <= hi; ++j) Q[j] += P[i] * row[j - lo] / sum;
      }
      P.swap(Q);
    }
    double acc = 0.0;
    for (int j = 0; j < G_; ++j) acc += P[j] * T_[l][j] * T_[l][j];
    qt_[l - 1] = acc;
  }
}

double ParisiRecursion::interp(const std::vector<double>& f, double x) const {
  double t = (x + L_) / dx_;
  if (t <= 0.0) return f.front();
  if (t >= G_ - 1) return f.back();
  int j = static_cast<int>(t);
  double a = t - j;
  return f[j] + a * (f[j + 1] - f[j]);
}

double ParisiRecursion::X(int l, double x) const { return std::abs(x) + interp(D_[l], x); }
double ParisiRecursion::T(int l, double x) const { return interp(T_[l], x); }

double ParisiRecursion::sample_increment(int l, double x, Rng& rng) const {
  const double s = std::sqrt(var_[l - 1]);
  const double ml = m_[l - 1];
  if (s == 0.0) return 0.0;
  if (ml == 0.0) return s * rng.normal();
  // density prop. to phi(z) exp(m X_l(x + s z)); envelope phi(z)(e^{my} + e^{-my})
  const double pplus = 0.5 * (1.0 + std::tanh(ml * x));
  for (;;) {
    double z = rng.normal() + (rng.uniform() < pplus ? ml * s : -ml * s);
    double y = x + s * z;
    double acc = std::exp(ml * (interp(D_[l], y) - dmax_[l])) / (1.0 + std::exp(-2.0 * ml * std::abs(y)));
    if (rng.uniform() < acc) return s * z;
  }
}

CascadeSpec solve_parisi_q(const CascadeSpec& start, const SKSpec& sk, double tol, int max_iter) {
  start.validate();
  CascadeSpec s = start;
  auto psi = [&](double x) { return sk.dxi(x); };
  for (int it = 0; it < max_iter; ++it) {
    ParisiRecursion rec(s.m, level_variances(s.q, psi));
    const auto& qt = rec.overlaps();
    double diff = 0.0;
    for (int l = 0; l < s.k(); ++l) diff = std::max(diff, std::abs(qt[l] - s.q[l]));
    for (int l = 0; l < s.k(); ++l) s.q[l] = qt[l];
    if (diff < tol) {
      for (int l = 1; l < s.k(); ++l)
        if (!(s.q[l] > s.q[l - 1] + 1e-6))
          throw Error(ErrorCode::numeric, "no nontrivial fixed point: overlap levels merge", "sigma.q");
      return s;
    }
  }
  throw Error(ErrorCode::numeric, "overlap fixed point did not converge", "sigma.q");
}

// ---- kernels ----

Kernel kernel_pow(int p) {
  return {"pow" + std::to_string(p), [p](double x) { return std::pow(x, p); }};
}
Kernel kernel_dxi(const SKSpec& sk) {
  return {"dxi", [sk](double x) { return sk.dxi(x); }};
}
Kernel kernel_theta(const SKSpec& sk) {
  return {"theta", [sk](double x) { return sk.theta(x); }};
}

// ---- World ----

void World::set_weights(std::vector<double> w) {
  w_ = std::move(w);
  logw_.resize(w_.size());
  cum_.resize(w_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    logw_[i] = w_[i] > 0.0 ? std::log(w_[i]) : -INFINITY;
    cum_[i] = (s += w_[i]);
  }
}

std::size_t World::sample_atom(Rng& rng) const {
  double u = rng.uniform() * cum_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) --it;
  return static_cast<std::size_t>(it - cum_.begin());
}

const std::vector<double>& World::site(std::size_t v) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sites_.find(v);
    if (it != sites_.end()) return it->second;
  }
  auto vals = make_site(v);
  std::lock_guard<std::mutex> lock(mu_);
  // first writer wins; a concurrent duplicate draw is identical anyway
  return sites_.emplace(v, std::move(vals)).first->second;
}

// ---- order parameters ----

struct OrderParameter::State {
  Kind kind = Kind::rs;
  RSParams rs;
  double rs_q = 0.0;
  TabulatedParams tab;
  std::vector<Eigen::MatrixXd> tab_Q;  // per w
  CascadeSKParams cas;
  std::shared_ptr<ParisiRecursion> rec;
};

namespace {

class RSWorld : public World {
 public:
  RSWorld(const OrderParameter::State& st, std::uint64_t seed) : st_(st) {
    seed_ = seed;
    set_weights({1.0});
  }
  double overlap(std::size_t, std::size_t) const override { return st_.rs_q; }
  double self_overlap(std::size_t) const override { return st_.rs_q; }
  void gaussian_field(const Kernel& psi, Rng& rng, std::span<double> out) const override {
    out[0] = std::sqrt(std::max(psi.f(st_.rs_q), 0.0)) * rng.normal();
  }

 protected:
  std::vector<double> make_site(std::size_t v) const override {
    Rng r(seed_child(seed_, v));
    double h = st_.rs.h_mean + st_.rs.h_sd * r.normal();
    return {std::tanh(h)};
  }

 private:
  const OrderParameter::State& st_;
};

class TabWorld : public World {
 public:
  TabWorld(const OrderParameter::State& st, std::uint64_t seed) : st_(st) {
    seed_ = seed;
    Rng r(seed);
    w_ = std::min(static_cast<int>(r.uniform() * st.tab.nw), st.tab.nw - 1);
    set_weights(std::vector<double>(st.tab.nu, 1.0 / st.tab.nu));
  }
  double overlap(std::size_t a, std::size_t b) const override { return st_.tab_Q[w_](a, b); }
  double self_overlap(std::size_t a) const override { return st_.tab_Q[w_](a, a); }
  void gaussian_field(const Kernel& psi, Rng& rng, std::span<double> out) const override {
    const Eigen::MatrixXd& Lf = factor(psi);
    const int n = static_cast<int>(Lf.rows());
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    Eigen::VectorXd g = Lf.triangularView<Eigen::Lower>() * z;
    for (int i = 0; i < n; ++i) out[i] = g(i);
  }

 protected:
  std::vector<double> make_site(std::size_t v) const override {
    Rng r(seed_child(seed_, v));
    int cell = std::min(static_cast<int>(r.uniform() * st_.tab.nv), st_.tab.nv - 1);
    std::vector<double> out(st_.tab.nu);
    for (int a = 0; a < st_.tab.nu; ++a) out[a] = st_.tab.at(w_, a, cell);
    return out;
  }

 private:
  const Eigen::MatrixXd& factor(const Kernel& psi) const {
    std::lock_guard<std::mutex> lock(fmu_);
    auto it = factors_.find(psi.id);
    if (it != factors_.end()) return it->second;
    const auto& Q = st_.tab_Q[w_];
    const int n = static_cast<int>(Q.rows());
    Eigen::MatrixXd C(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) C(i, j) = psi.f(Q(i, j));
    C.diagonal().array() += 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::numeric, "covariance factorization failed beyond jitter tolerance");
    return factors_.emplace(psi.id, llt.matrixL()).first->second;
  }

  const OrderParameter::State& st_;
  int w_ = 0;
  mutable std::mutex fmu_;
  mutable std::map<std::string, Eigen::MatrixXd> factors_;
};

class CascadeWorld : public World {
 public:
  CascadeWorld(const OrderParameter::State& st, std::uint64_t seed)
      : st_(st), c_(sample_cascade(st.cas.cascade, seed)) {
    seed_ = seed;
    set_weights(c_.weights);
  }
  double overlap(std::size_t a, std::size_t b) const override {
    return st_.rec->overlaps()[c_.lca_depth(a, b) - 1];
  }
  double self_overlap(std::size_t) const override { return st_.rec->overlaps().back(); }
  void gaussian_field(const Kernel& psi, Rng& rng, std::span<double> out) const override {
    auto var = level_variances(st_.rec->overlaps(), psi.f);
    auto f = sample_field(c_, var, rng.bits());
    std::copy(f.begin(), f.end(), out.begin());
  }
  const CascadeRealization& cascade() const { return c_; }

 protected:
  std::vector<double> make_site(std::size_t v) const override {
    const std::uint64_t site_seed = seed_child(seed_child(seed_, 0x517eULL), v);
    std::vector<double> val(c_.parent.size(), 0.0);
    for (std::size_t i = 1; i < c_.parent.size(); ++i) {
      Rng r(seed_child(site_seed, c_.node_key[i]));
      double x = val[c_.parent[i]];
      val[i] = x + st_.rec->sample_increment(c_.depth[i], x, r);
    }
    std::vector<double> out(c_.leaves.size());
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = std::tanh(val[c_.leaves[a]]);
    return out;
  }

 private:
  const OrderParameter::State& st_;
  CascadeRealization c_;
};

// keeps the state alive as long as a world refers to it
template <class W>
class Owned : public W {
 public:
  Owned(std::shared_ptr<const OrderParameter::State> st, std::uint64_t seed) : W(*st, seed), hold_(std::move(st)) {}

 private:
  std::shared_ptr<const OrderParameter::State> hold_;
};

}  // namespace

void TabulatedParams::validate() const {
  if (nw < 1 || nu < 1 || nv < 1) throw Error(ErrorCode::invalid_argument, "grid sizes must be >= 1", "sigma.table");
  if (values.size() != static_cast<std::size_t>(nw) * nu * nv)
    throw Error(ErrorCode::invalid_argument, "table must have nw*nu*nv entries", "sigma.table");
  for (double v : values)
    if (!(std::abs(v) <= 1.0)) throw Error(ErrorCode::invalid_argument, "table means must lie in [-1,1]", "sigma.table");
}

TabulatedParams TabulatedParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open table file " + path, "sigma.path");
  struct Row {
    int w, u, v;
    double x;
  };
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Row r;
    if (!(ls >> r.w)) continue;
    if (!(ls >> r.u >> r.v >> r.x) || r.w < 0 || r.u < 0 || r.v < 0)
      throw Error(ErrorCode::config, "bad table row at line " + std::to_string(lineno), "sigma.path");
    rows.push_back(r);
  }
  TabulatedParams t;
  t.nw = t.nu = t.nv = 0;
  for (auto& r : rows) {
    t.nw = std::max(t.nw, r.w + 1);
    t.nu = std::max(t.nu, r.u + 1);
    t.nv = std::max(t.nv, r.v + 1);
  }
  const std::size_t total = static_cast<std::size_t>(t.nw) * t.nu * t.nv;
  if (rows.size() != total) throw Error(ErrorCode::config, "table must list every grid cell once", "sigma.path");
  t.values.assign(total, NAN);
  for (auto& r : rows) t.values[(static_cast<std::size_t>(r.w) * t.nu + r.u) * t.nv + r.v] = r.x;
  for (double v : t.values)
    if (std::isnan(v)) throw Error(ErrorCode::config, "table has a repeated cell", "sigma.path");
  t.validate();
  return t;
}

TabulatedParams TabulatedParams::two_state(double c) {
  TabulatedParams t;
  t.nw = 1;
  t.nu = 2;
  t.nv = 2;
  t.values = {c, c, c, -c};
  return t;
}

OrderParameter OrderParameter::rs(RSParams p) {
  if (!(p.h_sd >= 0.0)) throw Error(ErrorCode::invalid_argument, "h_sd must be >= 0", "sigma.h_sd");
  if (std::isnan(p.h_mean)) throw Error(ErrorCode::invalid_argument, "h_mean must be a number", "sigma.h_mean");
  auto st = std::make_shared<State>();
  st->kind = Kind::rs;
  st->rs = p;
  if (p.h_sd == 0.0) {
    double t = std::tanh(p.h_mean);
    st->rs_q = t * t;
  } else {
    const auto& gh = gauss_hermite(96);
    double s = 0.0;
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
      double t = std::tanh(p.h_mean + p.h_sd * gh.x[i]);
      s += gh.w[i] * t * t;
    }
    st->rs_q = s;
  }
  OrderParameter o;
  o.st_ = st;
  return o;
}

OrderParameter OrderParameter::tabulated(TabulatedParams p) {
  p.validate();
  auto st = std::make_shared<State>();
  st->kind = Kind::tabulated;
  st->tab = std::move(p);
  const auto& t = st->tab;
  for (int w = 0; w < t.nw; ++w) {
    Eigen::MatrixXd Q(t.nu, t.nu);
    for (int a = 0; a < t.nu; ++a)
      for (int b = 0; b < t.nu; ++b) {
        double s = 0.0;
        for (int v = 0; v < t.nv; ++v) s += t.at(w, a, v) * t.at(w, b, v);
        Q(a, b) = s / t.nv;
      }
    st->tab_Q.push_back(Q);
  }
  OrderParameter o;
  o.st_ = st;
  return o;
}

OrderParameter OrderParameter::cascade_sk(CascadeSKParams p) {
  p.cascade.validate();
  p.sk.validate();
  auto st = std::make_shared<State>();
  st->kind = Kind::cascade_sk;
  if (p.self_consistent) p.cascade = solve_parisi_q(p.cascade, p.sk);
  st->rec = std::make_shared<ParisiRecursion>(p.cascade.m, level_variances(p.cascade.q, [&](double x) { return p.sk.dxi(x); }));
  st->cas = std::move(p);
  OrderParameter o;
  o.st_ = st;
  return o;
}

OrderParameter::Kind OrderParameter::kind() const { return st_->kind; }
bool OrderParameter::u_constant() const { return st_->kind == Kind::rs; }
double OrderParameter::rs_self_overlap() const { return st_->rs_q; }

const CascadeSpec& OrderParameter::cascade() const {
  require(st_->kind == Kind::cascade_sk, "order parameter is not cascade-based");
  return st_->cas.cascade;
}
const ParisiRecursion& OrderParameter::recursion() const {
  require(st_->kind == Kind::cascade_sk, "order parameter is not cascade-based");
  return *st_->rec;
}
const SKSpec& OrderParameter::sk() const {
  require(st_->kind == Kind::cascade_sk, "order parameter is not cascade-based");
  return st_->cas.sk;
}

OrderParameter OrderParameter::with_truncation(int M) const {
  require(st_->kind == Kind::cascade_sk, "order parameter is not cascade-based");
  auto st = std::make_shared<State>(*st_);
  st->cas.cascade.truncation = M;
  st->cas.cascade.validate();
  OrderParameter o;
  o.st_ = st;
  return o;
}

std::unique_ptr<World> OrderParameter::draw_world(std::uint64_t seed) const {
  switch (st_->kind) {
    case Kind::rs:
      return std::make_unique<Owned<RSWorld>>(st_, seed);
    case Kind::tabulated:
      return std::make_unique<Owned<TabWorld>>(st_, seed);
    case Kind::cascade_sk:
      return std::make_unique<Owned<CascadeWorld>>(st_, seed);
  }
  throw Error(ErrorCode::internal, "unknown order parameter kind");
}

// ---- overlap statistics ----

Estimate multioverlap(const OrderParameter& sigma, const std::vector<std::vector<int>>& pattern,
                      const MultiOverlapParams& mc, std::uint64_t seed) {
  require(!pattern.empty(), "multioverlap: empty pattern");
  require(mc.outer >= 2 && mc.inner >= 1 && mc.sites >= 1, "multioverlap: bad sample sizes");
  int labels = 0;
  for (const auto& t : pattern) {
    require(!t.empty(), "multioverlap: tuples need n >= 1");
    for (int l : t) {
      require(l >= 1, "multioverlap: replica labels are 1-based");
      labels = std::max(labels, l);
    }
  }
  std::vector<double> out(mc.outer);
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto world = sigma.draw_world(seed_child(seed, i));
    Rng rng(seed_child(seed_child(seed, i), 7));
    std::vector<std::size_t> at(labels + 1);
    double acc = 0.0;
    for (int t = 0; t < mc.inner; ++t) {
      for (int l = 1; l <= labels; ++l) at[l] = world->sample_atom(rng);
      double prod = 1.0;
      for (std::size_t j = 0; j < pattern.size(); ++j) {
        double R = 0.0;
        for (int s = 0; s < mc.sites; ++s) {
          const auto& site = world->site(j * mc.sites + s);
          double term = 1.0;
          if (mc.spins) {
            // one spin per distinct label at this site
            std::vector<int> spin(labels + 1, 0);
            for (int l : pattern[j]) {
              if (spin[l] == 0) spin[l] = rng.uniform() < 0.5 * (1.0 + site[at[l]]) ? 1 : -1;
              term *= spin[l];
            }
          } else {
            for (int l : pattern[j]) term *= site[at[l]];
          }
          R += term;
        }
        prod *= R / mc.sites;
      }
      acc += prod;
    }
    out[i] = acc / mc.inner;
  });
  return mean_estimate(out, seed);
}

QStar qstar_check(const OrderParameter& sigma, const MultiOverlapParams& mc, std::uint64_t seed) {
  require(mc.sites >= 2, "qstar_check: need at least two sites");
  std::vector<std::vector<double>> cols(2, std::vector<double>(mc.outer));
  const int half = mc.sites / 2;
  parallel_for(mc.outer, mc.threads, [&](std::size_t i) {
    auto world = sigma.draw_world(seed_child(seed, i));
    Rng rng(seed_child(seed_child(seed, i), 9));
    double ab = 0.0, mid = 0.0;
    for (int t = 0; t < mc.inner; ++t) {
      auto a = world->sample_atom(rng);
      double A = 0.0, B = 0.0;
      for (int s = 0; s < half; ++s) {
        double x = world->site(s)[a], y = world->site(half + s)[a];
        A += x * x;
        B += y * y;
      }
      A /= half;
      B /= half;
      ab += A * B;
      mid += 0.5 * (A + B);
    }
    cols[0][i] = ab / mc.inner;
    cols[1][i] = mid / mc.inner;
  });
  QStar q;
  q.mean = mean_estimate(cols[1], seed);
  q.variance = delta_estimate(cols, [](std::span<const double> m) { return m[0] - m[1] * m[1]; }, seed);
  return q;
}

ReweightedWorld draw_reweighted_world(const CascadeSpec& spec, const SKSpec& sk, int n_active, int n_sites,
                                      std::uint64_t seed) {
  require(n_active >= 0 && n_sites >= n_active, "reweighted world: need n_sites >= n_active >= 0");
  ReweightedWorld w;
  w.cascade = sample_cascade(spec, seed);
  auto var = level_variances(spec.q, [&](double x) { return sk.dxi(x); });
  for (int i = 0; i < n_sites; ++i) w.fields.push_back(sample_field(w.cascade, var, seed_child(seed, 1000 + i)));
  std::vector<double> logh(w.cascade.size(), 0.0);
  for (int i = 0; i < n_active; ++i)
    for (std::size_t a = 0; a < logh.size(); ++a) logh[a] += log_ch(w.fields[i][a]);
  w.tilted = tilt_weights_log(w.cascade.weights, logh);
  return w;
}

double cascade_sigma_mean(const ReweightedWorld& world, std::size_t leaf, std::size_t site) {
  if (site >= world.fields.size()) throw Error(ErrorCode::invalid_argument, "site not in field table");
  return std::tanh(world.fields[site][leaf]);
}

}  // namespace sglab
