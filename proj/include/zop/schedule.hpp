#pragma once

#include <cmath>
#include <cstdint>

#include "zop/errors.hpp"

namespace zop {

// Power-law gain decay: a_i = a1 / (A + i)^alpha, c_i = c1 / i^gamma.
// Both sequences are positive and nonincreasing in i.
struct GainSchedule {
  double a1 = 0.01;    // initial learning rate, > 0
  double c1 = 0.005;   // initial perturbation magnitude, in (0, 1]
  double alpha = 0.6;  // learning-rate decay exponent
  double gamma = 0.1;  // perturbation decay exponent
  double stability_offset = 0.0;  // A, applied to the learning rate only

  void validate() const {
    if (!(a1 > 0.0)) throw ConfigError("gain schedule: a1 must be positive");
    if (!(c1 > 0.0 && c1 <= 1.0))
      throw ConfigError("gain schedule: c1 must be in (0, 1]");
    if (!(alpha > 0.0))
      throw ConfigError("gain schedule: alpha must be positive");
    if (!(gamma > 0.0))
      throw ConfigError("gain schedule: gamma must be positive");
    if (!(stability_offset >= 0.0))
      throw ConfigError("gain schedule: stability offset must be >= 0");
  }

  double learning_rate(std::uint64_t i) const {
    return a1 / std::pow(stability_offset + double(i), alpha);
  }

  double perturbation(std::uint64_t i) const {
    return c1 / std::pow(double(i), gamma);
  }
};

struct GainPair {
  double a;
  double c;
};

inline GainPair gain_at(const GainSchedule& s, std::uint64_t i) {
  return {s.learning_rate(i), s.perturbation(i)};
}

}  // namespace zop
