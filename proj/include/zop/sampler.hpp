#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "zop/errors.hpp"
#include "zop/rng.hpp"

namespace zop {

enum class Perturbation { rademacher, segmented_uniform, gaussian };

inline const char* perturbation_name(Perturbation p) {
  switch (p) {
    case Perturbation::rademacher: return "rademacher";
    case Perturbation::segmented_uniform: return "segmented-uniform";
    case Perturbation::gaussian: return "gaussian";
  }
  return "?";
}

Perturbation parse_perturbation(const std::string& s);

// Source of mean-zero perturbation directions. Implementations advance a
// deterministic stream; two samplers constructed identically produce
// identical sequences.
class PerturbationSampler {
 public:
  explicit PerturbationSampler(std::size_t dimension) : dim_(dimension) {
    if (dimension < 1) throw ConfigError("sampler dimension must be >= 1");
  }
  virtual ~PerturbationSampler() = default;

  std::size_t dimension() const { return dim_; }
  virtual void sample(std::span<double> out) = 0;

  // True when E[1/|delta_j|] is finite, the SPSA admissibility condition.
  virtual bool finite_inverse_moments() const = 0;

 private:
  std::size_t dim_;
};

class RandomPerturbationSampler final : public PerturbationSampler {
 public:
  RandomPerturbationSampler(Perturbation kind, std::size_t dimension, Rng rng)
      : PerturbationSampler(dimension), kind_(kind), rng_(rng) {}

  void sample(std::span<double> out) override {
    switch (kind_) {
      case Perturbation::rademacher:
        for (double& x : out) x = rng_.coin() ? 1.0 : -1.0;
        break;
      case Perturbation::segmented_uniform:
        // Uniform over [-1, -0.5) u [0.5, 1): |1/x| <= 2 always holds.
        for (double& x : out) {
          const double u = rng_.uniform01();
          x = u < 0.5 ? -1.0 + u : u;
        }
        break;
      case Perturbation::gaussian:
        for (double& x : out) x = rng_.gaussian();
        break;
    }
  }

  bool finite_inverse_moments() const override {
    return kind_ != Perturbation::gaussian;
  }

  Perturbation kind() const { return kind_; }

 private:
  Perturbation kind_;
  Rng rng_;
};

// Cycles through all 2^d sign patterns in index order; averaging an SPSA
// estimate over one full cycle removes the perturbation randomness entirely.
// Test and verification use only (d <= 20).
class ExhaustiveRademacherSampler final : public PerturbationSampler {
 public:
  explicit ExhaustiveRademacherSampler(std::size_t dimension)
      : PerturbationSampler(dimension) {
    if (dimension > 20)
      throw ConfigError("exhaustive Rademacher enumeration limited to d<=20");
  }

  void sample(std::span<double> out) override {
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = (index_ >> j) & 1 ? 1.0 : -1.0;
    index_ = (index_ + 1) % (std::uint64_t{1} << dimension());
  }

  std::uint64_t pattern_count() const {
    return std::uint64_t{1} << dimension();
  }

  bool finite_inverse_moments() const override { return true; }

 private:
  std::uint64_t index_ = 0;
};

}  // namespace zop
