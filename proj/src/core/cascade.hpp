#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace sglab {

// q[l-1], m[l-1] hold q_l, m_l for l = 1..k; m[0] must be 0.
struct CascadeSpec {
  std::vector<double> q;
  std::vector<double> m;
  int truncation = 32;
  int dust_chains = 4;

  int k() const { return static_cast<int>(q.size()); }
  void validate() const;
  CascadeSpec with_truncation(int M) const;
};

class CascadeRealization {
 public:
  int k = 0;
  std::vector<double> q;

  // nodes in creation order; parents precede children
  std::vector<int> parent;
  std::vector<int> depth;
  std::vector<double> subtree_weight;
  std::vector<std::uint64_t> node_key;  // stable across truncation levels
  std::vector<char> dust;

  std::vector<int> leaves;  // node ids at depth k
  std::vector<double> weights;
  std::vector<int> self_depth;  // deepest distinct-replica depth per leaf (k unless dust)

  std::size_t size() const { return leaves.size(); }
  int ancestor(std::size_t leaf, int d) const { return anc_[leaf * (k + 1) + d]; }
  int lca_depth(std::size_t a, std::size_t b) const;
  double overlap(std::size_t a, std::size_t b) const { return q[lca_depth(a, b) - 1]; }
  std::size_t sample_replica(Rng& rng) const;

  // sum_b w_b f(level of a^b), for every leaf a; level runs 1..k
  std::vector<double> level_sums(const std::function<double(int)>& f) const;

  void finalize();

 private:
  std::vector<int> anc_;
  std::vector<double> cum_;
};

CascadeRealization sample_cascade(const CascadeSpec& spec, std::uint64_t seed);

// Leaf values of sum_l eta_node * sd_l with sd_l^2 = psi(q_l) - psi(q_{l-1}),
// first increment psi(q_1). The per-node noise comes from node_key streams.
std::vector<double> level_variances(std::span<const double> q, const std::function<double(double)>& psi);
std::vector<double> sample_field(const CascadeRealization& c, std::span<const double> level_var, std::uint64_t seed);
// node values instead of leaf values
std::vector<double> sample_field_nodes(const CascadeRealization& c, std::span<const double> level_var,
                                       std::uint64_t seed);

std::vector<double> tilt_weights(std::span<const double> w, std::span<const double> h);
// same from log factors, overflow safe
std::vector<double> tilt_weights_log(std::span<const double> w, std::span<const double> log_h);

struct GGFunction {
  int r12_power = 0;  // F = R12^r12_power
};

struct McParams {
  int outer = 2000;
  int inner = 128;
  int threads = 0;
};

// Replica averages are exact per cascade; the outer average is over cascades.
Estimate gg_on_cascade(const CascadeSpec& spec, int p, int n, GGFunction F, const McParams& mc, std::uint64_t seed);
// Same identity with replicas sampled (mc.inner tuples per cascade) and F an arbitrary
// function of the n x n overlap array (row-major).
Estimate gg_on_cascade_sampled(const CascadeSpec& spec, int p, int n,
                               const std::function<double(std::span<const double>, int)>& F, const McParams& mc,
                               std::uint64_t seed);

struct OverlapLaw {
  std::vector<Estimate> prob;  // P(R = q_l), l = 1..k
  std::int64_t triples_checked = 0;
  std::int64_t ultrametric_violations = 0;
};

OverlapLaw overlap_law(const CascadeSpec& spec, const McParams& mc, std::uint64_t seed);

}  // namespace sglab
