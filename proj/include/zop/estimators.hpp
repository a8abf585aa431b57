#pragma once

#include <cstdint>

#include "zop/oracle.hpp"
#include "zop/params.hpp"
#include "zop/rng.hpp"
#include "zop/sampler.hpp"

namespace zop {

struct GradientEstimate {
  ParameterVector gradient;
  std::uint64_t queries_used = 0;
  int repeats = 0;
};

// Two-sided simultaneous-perturbation estimate, averaged over `repeats`
// fresh perturbations in fixed summation order:
//   g_r[j] = (L(phi + c*delta_r) - L(phi - c*delta_r)) / (2*c*delta_r[j])
// The sampler must have finite inverse moments (Rademacher or segmented
// uniform); a Gaussian sampler is rejected.
GradientEstimate spsa_estimate(LossOracle& oracle,
                               std::span<const double> phi, double c,
                               PerturbationSampler& sampler, int repeats);

// One-sided Gaussian-smoothing estimate with one shared base evaluation:
//   g_r = ((L(phi + sigma*u_r) - L(phi)) / sigma) * u_r,  u_r ~ N(0, I)
GradientEstimate rgf_estimate(LossOracle& oracle, std::span<const double> phi,
                              double sigma, int repeats, Rng& directions);

}  // namespace zop
