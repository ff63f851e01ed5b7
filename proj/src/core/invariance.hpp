#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/functional.hpp"

namespace sglab {

// Replica indices in C are 1-based; 1..n are cavity coordinates, n+1..m plain sites.
struct InvarianceCase {
  int n = 1, m = 1, r = 0;
  std::vector<std::vector<int>> C;

  int q() const { return static_cast<int>(C.size()); }
  void validate() const;
  std::string label() const;
};

struct Residual {
  Estimate lhs, rhs, residual;
};

struct InvarianceParams {
  int outer = 2000;
  int inner = 512;  // guard only, E' is exact over atoms
  int threads = 0;
};

Residual invariance_diluted(const OrderParameter& sigma, const DilutedSpec& spec, const InvarianceCase& c,
                            const InvarianceParams& mc, std::uint64_t seed);
Residual invariance_sk(const OrderParameter& sigma, const SKSpec& spec, const InvarianceCase& c,
                       const InvarianceParams& mc, std::uint64_t seed);
// Tilt exp(t G_p); every index in C is a plain site.
Residual stochastic_stability_sk(const OrderParameter& sigma, int p, double t, const InvarianceCase& c,
                                 const InvarianceParams& mc, std::uint64_t seed);

enum class OverlapF { r12, r12_sq, r12_r13 };
std::string to_string(OverlapF f);

// E F(R) = E U / V^q with F a polynomial of the overlaps
Residual overlap_invariance_sk(const OrderParameter& sigma, const SKSpec& spec, OverlapF F, int n, int r,
                               const InvarianceParams& mc, std::uint64_t seed);

struct GGVariance {
  double t = 0.0;
  Estimate direct;     // E G^2 e^{tG}/E'e^{tG} - (E G e^{tG}/E'e^{tG})^2
  Estimate bracket;    // E R^{2p} - 2 E R12^p R13^p + (E R^p)^2
  Estimate algebraic;  // 1 - t^2 bracket
};

std::vector<GGVariance> gg_variance(const OrderParameter& sigma, int p, const std::vector<double>& ts,
                                    const InvarianceParams& mc, std::uint64_t seed);

// Named batteries: sc-general, sc-asc, sc-prebsc, sc-ascsc, sk-general, sk-ascsk,
// sk-prebscsk, sk-invar, sk-ss (sites only).
std::vector<InvarianceCase> preset_cases(const std::string& name);
const std::vector<std::string>& preset_names();

struct OverlapCase {
  OverlapF F;
  int n, r;
};
std::vector<OverlapCase> overlap_only_cases();

}  // namespace sglab
