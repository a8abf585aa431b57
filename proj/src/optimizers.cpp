#include "zop/optimizers.hpp"

#include <cmath>

namespace zop {

const char* optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::spsa: return "spsa";
    case OptimizerKind::spsa_gc: return "spsa-gc";
    case OptimizerKind::rgf: return "rgf";
    case OptimizerKind::nag: return "nag";
  }
  return "?";
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "spsa") return OptimizerKind::spsa;
  if (s == "spsa-gc") return OptimizerKind::spsa_gc;
  if (s == "rgf") return OptimizerKind::rgf;
  if (s == "nag") return OptimizerKind::nag;
  throw ConfigError("unknown optimizer '" + s +
                    "' (expected spsa, spsa-gc, rgf or nag)");
}

Perturbation parse_perturbation(const std::string& s) {
  if (s == "rademacher") return Perturbation::rademacher;
  if (s == "segmented-uniform") return Perturbation::segmented_uniform;
  if (s == "gaussian") return Perturbation::gaussian;
  throw ConfigError("unknown perturbation distribution '" + s + "'");
}

OptimizerState make_state(ParameterVector initial) {
  OptimizerState st;
  st.momentum = zeros(initial.size());
  st.phi = std::move(initial);
  st.iteration = 1;
  return st;
}

void apply_descent(OptimizerState& state, std::span<const double> g,
                   double a) {
  kernels::add_scaled_f64(state.phi.data(), g.data(), -a, state.phi.data(),
                          state.phi.size());
  ++state.iteration;
}

void spsa_step(OptimizerState& state, LossOracle& oracle,
               PerturbationSampler& sampler, const GainSchedule& schedule,
               int repeats) {
  const GainPair gain = gain_at(schedule, state.iteration);
  const GradientEstimate est =
      spsa_estimate(oracle, state.phi, gain.c, sampler, repeats);
  apply_descent(state, est.gradient, gain.a);
}

void spsa_gc_step(OptimizerState& state, LossOracle& oracle,
                  PerturbationSampler& sampler, const GainSchedule& schedule,
                  double beta, int repeats) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ConfigError("spsa-gc: beta must be in [0, 1]");
  const GainPair gain = gain_at(schedule, state.iteration);
  lookahead_momentum_step(
      state,
      [&](std::span<const double> lookahead) {
        return spsa_estimate(oracle, lookahead, gain.c, sampler, repeats)
            .gradient;
      },
      gain.a, beta);
}

void rgf_step(OptimizerState& state, LossOracle& oracle, Rng& directions,
              const GainSchedule& schedule, double sigma, int repeats) {
  const GainPair gain = gain_at(schedule, state.iteration);
  const GradientEstimate est =
      rgf_estimate(oracle, state.phi, sigma, repeats, directions);
  apply_descent(state, est.gradient, gain.a);
}

void nag_step(OptimizerState& state, const GradientFn& gradient,
              const GainSchedule& schedule, double beta) {
  const GainPair gain = gain_at(schedule, state.iteration);
  lookahead_momentum_step(
      state,
      [&](std::span<const double> lookahead) {
        ParameterVector g(lookahead.size());
        gradient(lookahead, g);
        return g;
      },
      gain.a, beta);
}

std::uint64_t queries_per_iteration(OptimizerKind kind, int repeats) {
  switch (kind) {
    case OptimizerKind::rgf: return std::uint64_t(repeats) + 1;
    case OptimizerKind::spsa:
    case OptimizerKind::spsa_gc:
    case OptimizerKind::nag: return 2 * std::uint64_t(repeats);
  }
  return 0;
}

std::uint64_t planned_iterations(const RunConfig& cfg) {
  if (!cfg.max_iterations && !cfg.max_queries)
    throw ConfigError("run: a budget (iterations or queries) is required");
  std::uint64_t iters = ~std::uint64_t{0};
  if (cfg.max_iterations) iters = *cfg.max_iterations;
  if (cfg.max_queries) {
    const std::uint64_t per = queries_per_iteration(cfg.kind, cfg.repeats);
    iters = std::min(iters, *cfg.max_queries / per);
  }
  return iters;
}

RunResult run(LossOracle& oracle, ParameterVector initial,
              const RunConfig& cfg, const Rng& rng,
              const GradientFn* true_gradient,
              const std::function<void(std::uint64_t)>* on_iteration_start) {
  cfg.schedule.validate();
  if (cfg.repeats < 1) throw ConfigError("run: repeats must be >= 1");
  if (cfg.kind == OptimizerKind::nag && !true_gradient)
    throw ConfigError("run: nag requires an analytic gradient function");

  RunResult result;
  result.state = make_state(std::move(initial));
  const std::uint64_t iterations = planned_iterations(cfg);
  if (iterations == 0) return result;

  RandomPerturbationSampler sampler(cfg.distribution,
                                    result.state.phi.size(),
                                    rng.substream("perturbation"));
  Rng directions = rng.substream("rgf-directions");

  auto log_point = [&](std::uint64_t iter) {
    const double loss = oracle.evaluate_bookkeeping(result.state.phi);
    const std::uint64_t q = cfg.kind == OptimizerKind::nag
                                ? iter * queries_per_iteration(cfg.kind,
                                                               cfg.repeats)
                                : oracle.query_count();
    result.trajectory.push_back({iter, q, loss});
    return loss;
  };

  const double initial_loss = log_point(0);
  const double divergence_limit =
      cfg.divergence_factor * (1.0 + std::abs(initial_loss));

  for (std::uint64_t i = 1; i <= iterations; ++i) {
    if (on_iteration_start) (*on_iteration_start)(i);
    switch (cfg.kind) {
      case OptimizerKind::spsa:
        spsa_step(result.state, oracle, sampler, cfg.schedule, cfg.repeats);
        break;
      case OptimizerKind::spsa_gc:
        spsa_gc_step(result.state, oracle, sampler, cfg.schedule, cfg.beta,
                     cfg.repeats);
        break;
      case OptimizerKind::rgf:
        rgf_step(result.state, oracle, directions, cfg.schedule, cfg.sigma,
                 cfg.repeats);
        break;
      case OptimizerKind::nag:
        nag_step(result.state, *true_gradient, cfg.schedule, cfg.beta);
        break;
    }
    result.iterations_run = i;

    bool runaway = false;
    for (double v : result.state.phi)
      if (!std::isfinite(v) || std::abs(v) > 1e100) runaway = true;
    if (runaway) {
      result.status = RunStatus::diverged;
      break;
    }
    if (i % cfg.log_interval == 0 || i == iterations) {
      const double loss = log_point(i);
      if (!(std::abs(loss) <= divergence_limit)) {
        result.status = RunStatus::diverged;
        break;
      }
    }
  }

  result.optimization_queries = oracle.query_count();
  result.bookkeeping_queries = oracle.bookkeeping_count();
  return result;
}

}  // namespace zop
