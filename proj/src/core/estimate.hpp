#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "core/model.hpp"

namespace sglab {

// -H and its single-flip changes on configurations packed into 64 bits
class LocalModel {
 public:
  explicit LocalModel(const ClauseSet& cs);
  explicit LocalModel(const SKDisorder& d);
  // the disorder is referenced, not copied
  LocalModel(ClauseSet&&) = delete;
  LocalModel(SKDisorder&&) = delete;
  ~LocalModel();
  LocalModel(LocalModel&&) noexcept;

  int N() const;
  double log_weight(std::uint64_t s) const;
  // log_weight(s with spin i flipped) - log_weight(s)
  double flip_delta(std::uint64_t s, int i) const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

struct ChainConfig {
  enum class Kernel { glauber, metropolis };
  int sweeps = 11000;  // including burn-in
  int burn_in = 1000;
  int thinning = 10;
  int n_replicas = 2;
  Kernel kernel = Kernel::glauber;

  void validate() const;
  int retained() const { return (sweeps - burn_in) / thinning; }
};

constexpr int kMaxChainN = 64;

struct ChainSamples {
  int N = 0;
  std::vector<std::vector<std::uint64_t>> replicas;  // [replica][sample], bit i = spin i is +1
};

ChainSamples mcmc_sample(const LocalModel& model, const ChainConfig& chain, std::uint64_t seed, int threads = 1);

inline int spin_of(std::uint64_t s, int i) { return (s >> i & 1u) ? 1 : -1; }
// N^{-1} sum_i prod_j sigma_i^{l_j}
double multioverlap_of(std::span<const std::uint64_t> configs, int N);

struct EstimateParams {
  int n_disorder = 200;
  int samples = 256;  // replica tuples per disorder when sampling from a Gibbs table
  bool use_chain = false;
  ChainConfig chain;
  int threads = 0;
};

// E <prod sigma_{site}^{replica}> for each request; a request is a list of
// (site, replica) pairs, both 0-based.
using MomentRequest = std::vector<std::pair<int, int>>;

std::vector<Estimate> annealed_moments(const DilutedSpec& spec, int N, const std::vector<MomentRequest>& req,
                                       const EstimateParams& mc, std::uint64_t seed);
std::vector<Estimate> annealed_moments(const SKSpec& spec, int N, const std::vector<MomentRequest>& req,
                                       const EstimateParams& mc, std::uint64_t seed);

// E <prod_t R_{tuple_t}>, replica labels 1-based
Estimate multioverlap_N(const DilutedSpec& spec, int N, const std::vector<std::vector<int>>& pattern,
                        const EstimateParams& mc, std::uint64_t seed);
Estimate multioverlap_N(const SKSpec& spec, int N, const std::vector<std::vector<int>>& pattern,
                        const EstimateParams& mc, std::uint64_t seed);

// F is evaluated on the n x n overlap array (row-major) of replicas 1..n.
using OverlapFunction = std::function<double(std::span<const double>, int)>;

struct GGFiniteRow {
  int N = 0;
  Estimate residual;
};

struct GGFinite {
  std::vector<std::pair<int, double>> beta_N;  // the one admissible draw used for every N
  std::vector<GGFiniteRow> rows;
  // |residual| at the largest N within 3 combined SE of |residual| at the smallest N
  bool monotone = false;
};

// spec.gg must be set; beta_N is drawn once (|beta_{N,p}| <= 2^{-p}, p in {1,2})
// when spec.gg->beta_N is empty.
GGFinite gg_finite_N(const SKSpec& spec, const std::vector<int>& Ns, int p, int n, const OverlapFunction& F,
                     const EstimateParams& mc, std::uint64_t seed);

}  // namespace sglab
