#pragma once

#include <cstdint>

#include "core/functional.hpp"
#include "core/invariance.hpp"

namespace sglab {

struct BoundReport {
  Estimate F_N;
  Estimate bound;
  Estimate slack;  // bound - F_N, SEs in quadrature
};

struct BoundParams {
  int outer = 2000;
  int inner = 128;
  int n_disorder = 400;
  int threads = 0;
};

constexpr int kMaxBoundDiluted = 16;
constexpr int kMaxBoundSK = 14;

// x^p - p x y^{p-1} + (p-1) y^p, p even
double convexity_term(double x, double y, int p);

// Both bounds refer to the unperturbed Hamiltonian.
BoundReport franz_leone_upper(const OrderParameter& sigma, const DilutedSpec& spec, int N, const BoundParams& mc,
                              std::uint64_t seed);
BoundReport guerra_upper_sk(const OrderParameter& sigma, const SKSpec& spec, int N, const BoundParams& mc,
                            std::uint64_t seed);

// The N-system is embedded in the (N+1)-system: shared uniforms for Poisson
// counts and indices (diluted), sub-tensor of the larger couplings (SK).
std::pair<ClauseSet, ClauseSet> sample_diluted_pair(const DilutedSpec& spec, int N, std::uint64_t seed);
std::pair<SKDisorder, SKDisorder> sample_sk_pair(const SKSpec& spec, int N, std::uint64_t seed);

Estimate ass_lower(const DilutedSpec& spec, int N, int n_disorder, std::uint64_t seed, int threads = 0);
Estimate ass_lower(const SKSpec& spec, int N, int n_disorder, std::uint64_t seed, int threads = 0);

struct CavityCheck {
  Residual first;   // log Z_{N+1}/Z'_N against log <sum_eps exp sum theta(eps, rho)>'
  Residual second;  // log Z_N/Z'_N against log <exp sum theta(rho)>'
};

constexpr int kMaxCavity = 12;

CavityCheck cavity_decomposition_check(const DilutedSpec& spec, int N, int n_disorder, std::uint64_t seed,
                                       int threads = 0);

}  // namespace sglab
