#include "core/rng.hpp"

#include <cmath>

#include "core/common.hpp"

namespace sglab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::uint64_t mix_label(std::uint64_t h, std::string_view label) {
  // length prefix keeps ("ab","c") apart from ("a","bc")
  h = splitmix64(h ^ static_cast<std::uint64_t>(label.size()));
  return splitmix64(h ^ fnv1a64(label));
}
}  // namespace

std::uint64_t seed_derive(std::uint64_t master, const std::vector<std::string>& labels) {
  require(!labels.empty(), "seed_derive: empty label path");
  std::uint64_t h = splitmix64(master);
  for (const auto& l : labels) h = mix_label(h, l);
  return h;
}

std::uint64_t seed_derive(std::uint64_t master, std::initializer_list<std::string_view> labels) {
  require(labels.size() > 0, "seed_derive: empty label path");
  std::uint64_t h = splitmix64(master);
  for (auto l : labels) h = mix_label(h, l);
  return h;
}

std::uint64_t seed_child(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    w = splitmix64(x - 0x9e3779b97f4a7c15ULL);
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t poisson_inverse(double mean, double u) {
  if (mean <= 0.0) return 0;
  // walk the CDF in log space so large means do not underflow e^{-mean}
  double log_p = -mean;
  double cdf = std::exp(log_p);
  std::uint64_t k = 0;
  const std::uint64_t cap = static_cast<std::uint64_t>(mean + 40.0 * std::sqrt(mean) + 100.0);
  if (cdf == 0.0) {
    // start near the mode instead
    k = static_cast<std::uint64_t>(std::floor(mean));
    double lp = k * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0);
    // lower tail mass up to mode via normal approximation is not exact; sum explicitly downward
    double mode_lp = lp;
    double acc = 0.0;
    double t = mode_lp;
    for (std::uint64_t j = k + 1; j-- > 0;) {
      acc += std::exp(t);
      if (j == 0) break;
      t -= std::log(mean) - std::log(static_cast<double>(j));
      if (t < mode_lp - 60.0) break;
    }
    cdf = acc;
    log_p = mode_lp;
    while (cdf < u && k < cap) {
      ++k;
      log_p += std::log(mean) - std::log(static_cast<double>(k));
      cdf += std::exp(log_p);
    }
    return k;
  }
  while (cdf < u && k < cap) {
    ++k;
    log_p += std::log(mean) - std::log(static_cast<double>(k));
    cdf += std::exp(log_p);
  }
  return k;
}

std::uint64_t Rng::poisson(double mean) {
  require(mean >= 0.0 && std::isfinite(mean), "poisson: mean must be finite and nonnegative");
  if (mean == 0.0) return 0;
  if (mean < 30.0) return poisson_inverse(mean, uniform());
  // PTRS transformed rejection (Hormann 1993)
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double U = uniform() - 0.5;
    double V = uniform();
    double us = 0.5 - std::abs(U);
    double k = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace sglab
