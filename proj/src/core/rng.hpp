#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>
#include <cmath>

namespace sglab {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

// Sub-seed from a master seed and a nonempty label path.
std::uint64_t seed_derive(std::uint64_t master, const std::vector<std::string>& labels);
std::uint64_t seed_derive(std::uint64_t master, std::initializer_list<std::string_view> labels);
// Cheap numeric child for hot loops: mixes one integer index into a seed.
std::uint64_t seed_child(std::uint64_t seed, std::uint64_t index);

// xoshiro256** seeded through splitmix64; seeding is cheap enough to give
// every tree node and every task its own stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t bits() {
    const std::uint64_t out = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }
  // uniform on the open interval (0,1)
  double uniform() { return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53; }
  double normal();
  double exponential() { return -std::log(uniform()); }
  std::uint64_t poisson(double mean);
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  int sign() { return (bits() >> 63) ? 1 : -1; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Poisson by inversion from a given uniform, usable for common-random-number couplings.
std::uint64_t poisson_inverse(double mean, double u);

}  // namespace sglab
