#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/model.hpp"
#include "core/order_param.hpp"

namespace sglab {

struct FunctionalParams {
  int outer = 2000;
  int inner = 128;  // kept as a guard; E' is an exact sum over atoms
  int threads = 0;
};

// log E_x exp theta(args) for every atom. The first n_fixed arguments are the
// bits of `fixed` (bit j set = +1); the rest are spins at `sites`.
void theta_log_mean(const World& world, const ThetaDraw& th, unsigned fixed, int n_fixed,
                    std::span<const std::size_t> sites, std::span<double> out);

// Hands out fresh site indices inside one world.
class SiteCounter {
 public:
  explicit SiteCounter(std::size_t start = 0) : next_(start) {}
  std::size_t take() { return next_++; }
  std::vector<std::size_t> take(int n) {
    std::vector<std::size_t> v(n);
    for (auto& x : v) x = next_++;
    return v;
  }

 private:
  std::size_t next_;
};

// Per-atom cavity quantities of one diluted draw.
struct DilutedCavity {
  std::vector<double> a_plus, a_minus;  // log E_x exp A(+1), A(-1)
};

// Draws pi(p alpha) terms of A around fresh sites and integrates x per atom.
DilutedCavity draw_cavity_A(const World& world, const DilutedSpec& spec, SiteCounter& sites, Rng& rng);
// log E_x exp sum_{k <= count} theta_k(s...) per atom, fresh sites
std::vector<double> draw_cavity_B(const World& world, const DilutedSpec& spec, std::uint64_t count, SiteCounter& sites,
                                  Rng& rng);

Estimate eval_P_diluted(const OrderParameter& sigma, const DilutedSpec& spec, const FunctionalParams& mc,
                        std::uint64_t seed);
Estimate eval_Pn_diluted(const OrderParameter& sigma, const DilutedSpec& spec, int n, const FunctionalParams& mc,
                         std::uint64_t seed);
// E log E' exp B - (p-1) alpha E log E' exp theta(s_1..s_p)
Estimate plast_check(const OrderParameter& sigma, const DilutedSpec& spec, const FunctionalParams& mc,
                     std::uint64_t seed);

// Per-atom Gaussian fields with their completion variances.
struct SKFields {
  std::vector<double> g;   // g(a)
  std::vector<double> b2;  // psi(1) - psi(self(a))
};
SKFields draw_sk_field(const World& world, const Kernel& psi, Rng& rng);

Estimate eval_P_sk(const OrderParameter& sigma, const SKSpec& spec, const FunctionalParams& mc, std::uint64_t seed);
Estimate eval_Pn_sk(const OrderParameter& sigma, const SKSpec& spec, int n, const FunctionalParams& mc,
                    std::uint64_t seed);

}  // namespace sglab
