#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zop/optimizers.hpp"
#include "zop/oracle.hpp"
#include "zop/rng.hpp"

namespace zop {

// sum_{i=1}^{d-1} [ 100*(x_{i+1} - x_i^2)^2 + (1 - x_i)^2 ], d >= 2
double rosenbrock(std::span<const double> x);
void rosenbrock_gradient(std::span<const double> x, std::span<double> g);

struct BenchmarkProblem {
  std::string name;
  std::size_t dimension = 0;
  ParameterVector initial_point;
  ParameterVector optimum_point;
  std::function<double(std::span<const double>)> loss;
  GradientFn gradient;  // empty when no analytic gradient is available
  double initial_loss = 0.0;
  double optimum_loss = 0.0;
};

// Alternating (-1, 1, -1, ...) start, optimum at (1, ..., 1).
BenchmarkProblem make_rosenbrock_problem(std::size_t dimension);

// Additive Gaussian observation noise on optimization queries; logging
// queries report the clean loss. noise_scale = 0 reproduces the clean
// oracle exactly.
class NoisyOracle final : public LossOracle {
 public:
  NoisyOracle(std::size_t dimension,
              std::function<double(std::span<const double>)> clean,
              double noise_scale, Rng noise_stream);

  std::size_t dimension() const override { return dim_; }

 protected:
  double loss(std::span<const double> phi) override;
  double loss_for_logging(std::span<const double> phi) override;

 private:
  std::size_t dim_;
  std::function<double(std::span<const double>)> clean_;
  double scale_;
  Rng noise_;
};

// |L* - L| / |L* - L0|; 1 at the start, 0 at the optimum.
double normalized_loss(double l_theta, double l_star, double l_0);

// ---- optimizer comparison on a benchmark problem ----

struct ComparisonConfig {
  std::vector<OptimizerKind> optimizers;
  std::uint64_t budget = 20000;   // queries, or iterations when
  bool iteration_matched = false; // iteration_matched is set
  std::vector<std::uint64_t> seeds;
  std::vector<double> noise_scales{0.0};
  GainSchedule schedule;
  // per-optimizer learning rates (each method tuned by its own sweep);
  // 0 falls back to schedule.a1
  double a1_spsa = 0.0, a1_spsa_gc = 0.0, a1_rgf = 0.0, a1_nag = 0.0;
  double beta = 0.9;
  int repeats = 5;
  Perturbation distribution = Perturbation::segmented_uniform;
  double sigma = 0.5;
  std::uint64_t log_interval = 50;

  double a1_for(OptimizerKind kind) const;
};

struct ComparisonCell {
  OptimizerKind optimizer;
  std::uint64_t seed = 0;
  double noise_scale = 0.0;
  RunResult run;
  std::vector<double> normalized;  // parallel to run.trajectory
  double final_normalized = 0.0;
};

struct ComparisonSummary {
  OptimizerKind optimizer;
  double noise_scale = 0.0;
  double median_final = 0.0;
  double iqr_final = 0.0;
  double variance_final = 0.0;
};

struct DegradationRow {
  OptimizerKind optimizer;
  double noise_scale = 0.0;
  // median over seeds of final(seed, scale) - final(seed, cleanest scale)
  double median_degradation = 0.0;
};

struct ComparisonResult {
  std::vector<ComparisonCell> cells;
  std::vector<ComparisonSummary> summaries;
  std::vector<DegradationRow> degradations;
};

ComparisonResult run_comparison(const BenchmarkProblem& problem,
                                const ComparisonConfig& cfg);

// Deterministic order statistics (linear interpolation between ranks).
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

}  // namespace zop
