#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace zop {

// Deterministic splittable random stream (splitmix64 core). A run owns one
// master seed; every stochastic component draws from a named substream so
// that components stay independently reproducible no matter how the others
// advance. Identical (seed, name) always yields the identical sequence on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed), base_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Derived from the seed this stream was constructed with, not from its
  // current position.
  Rng substream(std::string_view name) const {
    return Rng(mix(base_ ^ hash_name(name)));
  }
  Rng substream(std::string_view name, std::uint64_t index) const {
    return Rng(mix(base_ ^ hash_name(name) ^ (index * 0xd6e8feb86659fd93ULL)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform01_open_low() {
    return double((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Box-Muller; the second deviate of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Unbiased integer in [0, n); rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t state_;
  std::uint64_t base_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace zop
