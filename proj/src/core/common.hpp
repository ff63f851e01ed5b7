#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sglab {

enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,
  config = 2,
  numeric = 3,
  limit = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg, std::string location = {})
      : std::runtime_error(std::move(msg)), code_(code), location_(std::move(location)) {}
  ErrorCode code() const noexcept { return code_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  std::string location_;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); }
inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  double bias = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

// difference of two independent estimates
inline Estimate minus(const Estimate& a, const Estimate& b) {
  Estimate r;
  r.value = a.value - b.value;
  r.se = std::hypot(a.se, b.se);
  r.bias = a.bias - b.bias;
  r.n = std::min(a.n, b.n);
  r.seed = a.seed;
  return r;
}

inline bool within(const Estimate& e, double target, double k) {
  return std::abs(e.value - target) <= k * e.se;
}

class Welford {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double se() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

Estimate mean_estimate(std::span<const double> xs, std::uint64_t seed = 0);

// f(column means) with delta-method SE; cols[j][i] is draw i of quantity j.
Estimate delta_estimate(const std::vector<std::vector<double>>& cols,
                        const std::function<double(std::span<const double>)>& f,
                        std::uint64_t seed = 0);

double log_sum_exp(std::span<const double> xs);
double log_sum_exp(std::span<const double> xs, std::span<const double> log_w);

inline double log_ch(double x) {
  double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

inline bool is_even(int p) { return p % 2 == 0; }

}  // namespace sglab
