#include "zop/estimators.hpp"

#include "zop/kernels.hpp"

namespace zop {

GradientEstimate spsa_estimate(LossOracle& oracle,
                               std::span<const double> phi, double c,
                               PerturbationSampler& sampler, int repeats) {
  if (!(c > 0.0)) throw ConfigError("spsa: perturbation magnitude must be > 0");
  if (repeats < 1) throw ConfigError("spsa: repeats must be >= 1");
  if (sampler.dimension() != phi.size())
    throw ConfigError("spsa: sampler dimension does not match parameters");
  if (!sampler.finite_inverse_moments())
    throw ConfigError(
        "spsa: sampler violates the finite-inverse-moment condition "
        "(use rademacher or segmented-uniform, not gaussian)");

  const std::size_t d = phi.size();
  GradientEstimate est;
  est.gradient = zeros(d);
  est.repeats = repeats;

  ParameterVector delta(d), probe(d);
  for (int r = 0; r < repeats; ++r) {
    sampler.sample(delta);
    kernels::add_scaled_f64(phi.data(), delta.data(), c, probe.data(), d);
    const double loss_plus = oracle.evaluate(probe);
    kernels::add_scaled_f64(phi.data(), delta.data(), -c, probe.data(), d);
    const double loss_minus = oracle.evaluate(probe);
    const double scale = (loss_plus - loss_minus) / (2.0 * c);
    kernels::accum_recip_scaled_f64(scale, delta.data(), est.gradient.data(),
                                    d);
  }
  kernels::scale_f64(1.0 / double(repeats), est.gradient.data(), d);
  est.queries_used = 2 * std::uint64_t(repeats);
  return est;
}

GradientEstimate rgf_estimate(LossOracle& oracle, std::span<const double> phi,
                              double sigma, int repeats, Rng& directions) {
  if (!(sigma > 0.0)) throw ConfigError("rgf: sigma must be > 0");
  if (repeats < 1) throw ConfigError("rgf: repeats must be >= 1");

  const std::size_t d = phi.size();
  GradientEstimate est;
  est.gradient = zeros(d);
  est.repeats = repeats;

  const double base = oracle.evaluate(phi);
  ParameterVector direction(d), probe(d);
  for (int r = 0; r < repeats; ++r) {
    for (double& u : direction) u = directions.gaussian();
    kernels::add_scaled_f64(phi.data(), direction.data(), sigma, probe.data(),
                            d);
    const double value = oracle.evaluate(probe);
    kernels::axpy_f64((value - base) / sigma, direction.data(),
                      est.gradient.data(), d);
  }
  kernels::scale_f64(1.0 / double(repeats), est.gradient.data(), d);
  est.queries_used = std::uint64_t(repeats) + 1;
  return est;
}

}  // namespace zop
