#pragma once

#include <vector>

namespace sglab {

// Nodes and weights for E f(Z), Z ~ N(0,1). Weights sum to 1.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_hermite(int n);

}  // namespace sglab
