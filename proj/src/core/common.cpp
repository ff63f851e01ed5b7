#include "core/common.hpp"

#include <algorithm>

namespace sglab {

Estimate mean_estimate(std::span<const double> xs, std::uint64_t seed) {
  Welford w;
  for (double x : xs) w.add(x);
  Estimate e;
  e.value = w.mean();
  e.se = w.se();
  e.n = w.count();
  e.seed = seed;
  return e;
}

Estimate delta_estimate(const std::vector<std::vector<double>>& cols,
                        const std::function<double(std::span<const double>)>& f,
                        std::uint64_t seed) {
  require(!cols.empty(), "delta_estimate: no columns");
  const std::size_t d = cols.size();
  const std::size_t n = cols[0].size();
  require(n >= 2, "delta_estimate: need at least two draws");
  std::vector<double> mu(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    require(cols[j].size() == n, "delta_estimate: ragged columns");
    for (double x : cols[j]) mu[j] += x;
    mu[j] /= static_cast<double>(n);
  }
  std::vector<double> grad(d);
  for (std::size_t j = 0; j < d; ++j) {
    double h = 1e-6 * std::max(1.0, std::abs(mu[j]));
    auto up = mu, dn = mu;
    up[j] += h;
    dn[j] -= h;
    grad[j] = (f(up) - f(dn)) / (2 * h);
  }
  // variance of the linearized per-draw quantity
  Welford w;
  for (std::size_t i = 0; i < n; ++i) {
    double lin = 0.0;
    for (std::size_t j = 0; j < d; ++j) lin += grad[j] * (cols[j][i] - mu[j]);
    w.add(lin);
  }
  Estimate e;
  e.value = f(mu);
  e.se = std::sqrt(w.variance() / static_cast<double>(n));
  e.n = static_cast<std::int64_t>(n);
  e.seed = seed;
  return e;
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sum_exp(std::span<const double> xs, std::span<const double> log_w) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) m = std::max(m, xs[i] + log_w[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::exp(xs[i] + log_w[i] - m);
  return m + std::log(s);
}

}  // namespace sglab

#include <thread>

#include "core/parallel.hpp"

namespace sglab {

int default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace sglab
