#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "core/cascade.hpp"
#include "core/model.hpp"

namespace sglab {

// X_k = log ch, X_{l-1}(x) = (1/m_l) log E exp(m_l X_l(x + s_l z)) on a grid.
// Samples the change-of-density field g' level by level and reports the
// overlaps E_v th g'(a) th g'(b) at each level.
class ParisiRecursion {
 public:
  ParisiRecursion(std::vector<double> m, std::vector<double> level_var, int gh_order = 64);

  int k() const { return static_cast<int>(m_.size()); }
  double X(int l, double x) const;
  double T(int l, double x) const;
  double sample_increment(int l, double x, Rng& rng) const;
  const std::vector<double>& overlaps() const { return qt_; }
  const std::vector<double>& level_var() const { return var_; }

 private:
  double interp(const std::vector<double>& f, double x) const;

  std::vector<double> m_, var_;
  double L_ = 0.0, dx_ = 0.0;
  int G_ = 0;
  std::vector<std::vector<double>> D_;  // X_l(x) - |x|
  std::vector<std::vector<double>> T_;
  std::vector<double> dmax_;
  std::vector<double> qt_;
};

struct Kernel {
  std::string id;
  std::function<double(double)> f;
};

Kernel kernel_pow(int p);
Kernel kernel_dxi(const SKSpec& sk);
Kernel kernel_theta(const SKSpec& sk);

// One draw of w: a finite set of atoms (replica positions u) with weights,
// their overlaps, and lazily drawn site means.
class World {
 public:
  virtual ~World() = default;

  std::size_t atoms() const { return w_.size(); }
  std::span<const double> weights() const { return w_; }
  std::span<const double> log_weights() const { return logw_; }
  std::size_t sample_atom(Rng& rng) const;

  // two distinct replicas sitting at atoms a and b
  virtual double overlap(std::size_t a, std::size_t b) const = 0;
  virtual double self_overlap(std::size_t a) const = 0;
  // centered Gaussian over atoms with Cov = psi(overlap), Var = psi(self_overlap)
  virtual void gaussian_field(const Kernel& psi, Rng& rng, std::span<double> out) const = 0;

  // site means sigma(w, a, v) for every atom a; cached per site index
  const std::vector<double>& site(std::size_t v) const;

 protected:
  void set_weights(std::vector<double> w);
  virtual std::vector<double> make_site(std::size_t v) const = 0;

  std::uint64_t seed_ = 0;

 private:
  std::vector<double> w_, logw_, cum_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::vector<double>> sites_;
};

struct RSParams {
  double h_mean = 0.0;
  double h_sd = 0.0;
};

struct TabulatedParams {
  int nw = 1, nu = 1, nv = 1;
  std::vector<double> values;  // index (w * nu + u) * nv + v

  double at(int w, int u, int v) const { return values[(static_cast<std::size_t>(w) * nu + u) * nv + v]; }
  void validate() const;
  // rows "w u v value" with 0-based grid indices
  static TabulatedParams load(const std::string& path);
  static TabulatedParams two_state(double c);
};

struct CascadeSKParams {
  CascadeSpec cascade;
  SKSpec sk;
  bool self_consistent = true;
};

class OrderParameter {
 public:
  enum class Kind { rs, tabulated, cascade_sk };

  static OrderParameter rs(RSParams p);
  static OrderParameter tabulated(TabulatedParams p);
  static OrderParameter cascade_sk(CascadeSKParams p);

  Kind kind() const;
  bool u_constant() const;
  std::unique_ptr<World> draw_world(std::uint64_t seed) const;

  // cascade only
  const CascadeSpec& cascade() const;
  const ParisiRecursion& recursion() const;
  const SKSpec& sk() const;
  OrderParameter with_truncation(int M) const;

  double rs_self_overlap() const;

  struct State;

 private:
  std::shared_ptr<const State> st_;
};

// Fixed point q_l = E_v th g'(a) th g'(b) at level l for the given m and xi.
CascadeSpec solve_parisi_q(const CascadeSpec& start, const SKSpec& sk, double tol = 1e-10, int max_iter = 5000);

struct MultiOverlapParams {
  int outer = 2000;
  int inner = 16;   // replica tuples per world
  int sites = 32;   // sites per overlap factor
  bool spins = false;
  int threads = 0;
};

// E prod_t R_{tuple_t}; replica labels are 1-based.
Estimate multioverlap(const OrderParameter& sigma, const std::vector<std::vector<int>>& pattern,
                      const MultiOverlapParams& mc, std::uint64_t seed);

struct QStar {
  Estimate mean;      // E_v sigma^2 averaged over (w, u)
  Estimate variance;  // Var over (w, u) of E_v sigma^2
};

QStar qstar_check(const OrderParameter& sigma, const MultiOverlapParams& mc, std::uint64_t seed);

// Reweighting form: Gaussian xi' fields per site on a cascade, weights tilted by
// prod_{i < n_active} ch g_i.
struct ReweightedWorld {
  CascadeRealization cascade;
  std::vector<std::vector<double>> fields;
  std::vector<double> tilted;
};

ReweightedWorld draw_reweighted_world(const CascadeSpec& spec, const SKSpec& sk, int n_active, int n_sites,
                                      std::uint64_t seed);
double cascade_sigma_mean(const ReweightedWorld& world, std::size_t leaf, std::size_t site);

}  // namespace sglab
