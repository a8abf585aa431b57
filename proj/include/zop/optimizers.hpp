#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zop/estimators.hpp"
#include "zop/kernels.hpp"
#include "zop/oracle.hpp"
#include "zop/params.hpp"
#include "zop/rng.hpp"
#include "zop/sampler.hpp"
#include "zop/schedule.hpp"

namespace zop {

enum class OptimizerKind { spsa, spsa_gc, rgf, nag };

const char* optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& s);

// phi with a momentum buffer and a 1-based iteration counter. momentum is
// zero at i = 1; beta = 0 collapses the momentum path onto plain descent,
// bit for bit.
struct OptimizerState {
  ParameterVector phi;
  ParameterVector momentum;
  std::uint64_t iteration = 1;
};

OptimizerState make_state(ParameterVector initial);

// phi <- phi - a * g
void apply_descent(OptimizerState& state, std::span<const double> g, double a);

// Shared look-ahead momentum update:
//   m' = beta*m - a*g(phi + beta*m);  phi' = phi + m'
// Used verbatim by both the estimated-gradient and true-gradient paths so
// optimizer comparisons isolate gradient quality.
template <class GradAt>
void lookahead_momentum_step(OptimizerState& state, GradAt&& gradient_at,
                             double a, double beta) {
  const std::size_t d = state.phi.size();
  ParameterVector lookahead(d);
  kernels::add_scaled_f64(state.phi.data(), state.momentum.data(), beta,
                          lookahead.data(), d);
  const ParameterVector g = gradient_at(std::span<const double>(lookahead));
  kernels::axpby_f64(-a, g.data(), beta, state.momentum.data(), d);
  kernels::axpy_f64(1.0, state.momentum.data(), state.phi.data(), d);
  ++state.iteration;
}

void spsa_step(OptimizerState& state, LossOracle& oracle,
               PerturbationSampler& sampler, const GainSchedule& schedule,
               int repeats);

void spsa_gc_step(OptimizerState& state, LossOracle& oracle,
                  PerturbationSampler& sampler, const GainSchedule& schedule,
                  double beta, int repeats);

void rgf_step(OptimizerState& state, LossOracle& oracle, Rng& directions,
              const GainSchedule& schedule, double sigma, int repeats);

using GradientFn =
    std::function<void(std::span<const double>, std::span<double>)>;

void nag_step(OptimizerState& state, const GradientFn& gradient,
              const GainSchedule& schedule, double beta);

// ---- full run loop ----

struct RunConfig {
  OptimizerKind kind = OptimizerKind::spsa_gc;
  GainSchedule schedule;
  double beta = 0.9;
  int repeats = 5;
  Perturbation distribution = Perturbation::segmented_uniform;
  double sigma = 0.5;  // rgf smoothing radius
  std::optional<std::uint64_t> max_iterations;
  std::optional<std::uint64_t> max_queries;
  std::uint64_t log_interval = 10;
  double divergence_factor = 1e6;
};

// Oracle queries consumed by one iteration (2*repeats for the SPSA family,
// repeats+1 for RGF). NAG consumes none; it is charged the SPSA-family price
// so query-matched comparisons share an x-axis.
std::uint64_t queries_per_iteration(OptimizerKind kind, int repeats);

std::uint64_t planned_iterations(const RunConfig& cfg);

enum class RunStatus { ok, diverged };

struct TrajectoryPoint {
  std::uint64_t iteration;
  std::uint64_t queries;
  double loss;  // clean loss at phi_i, recorded via the bookkeeping counter
};

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::vector<TrajectoryPoint> trajectory;
  OptimizerState state;
  std::uint64_t optimization_queries = 0;
  std::uint64_t bookkeeping_queries = 0;
  std::uint64_t iterations_run = 0;
};

// Runs the configured optimizer against the oracle. `rng` seeds the
// perturbation / direction substreams. NAG requires `true_gradient`.
// `on_iteration_start`, when set, fires before each step (the adaptation
// harness uses it to reseat the minibatch).
RunResult run(LossOracle& oracle, ParameterVector initial,
              const RunConfig& cfg, const Rng& rng,
              const GradientFn* true_gradient = nullptr,
              const std::function<void(std::uint64_t)>* on_iteration_start =
                  nullptr);

}  // namespace zop
