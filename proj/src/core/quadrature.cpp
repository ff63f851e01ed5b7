#include "core/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "core/common.hpp"

namespace sglab {

namespace {
GaussRule golub_welsch(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    J(i, i - 1) = std::sqrt(static_cast<double>(i));
    J(i - 1, i) = J(i, i - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    r.w[i] = v * v;
    s += r.w[i];
  }
  for (auto& w : r.w) w /= s;
  return r;
}
}  // namespace

const GaussRule& gauss_hermite(int n) {
  require(n >= 1 && n <= 512, "gauss_hermite: order out of range");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, golub_welsch(n)).first;
  return it->second;
}

}  // namespace sglab
