#include "zop/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zop {

double rosenbrock(std::span<const double> x) {
  if (x.size() < 2) throw ConfigError("rosenbrock requires dimension >= 2");
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double t = x[i + 1] - x[i] * x[i];
    const double u = 1.0 - x[i];
    f += 100.0 * t * t + u * u;
  }
  return f;
}

void rosenbrock_gradient(std::span<const double> x, std::span<double> g) {
  if (x.size() < 2) throw ConfigError("rosenbrock requires dimension >= 2");
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double t = x[i + 1] - x[i] * x[i];
    g[i] += -400.0 * t * x[i] - 2.0 * (1.0 - x[i]);
    g[i + 1] += 200.0 * t;
  }
}

BenchmarkProblem make_rosenbrock_problem(std::size_t dimension) {
  if (dimension < 2) throw ConfigError("rosenbrock requires dimension >= 2");
  BenchmarkProblem p;
  p.name = "rosenbrock";
  p.dimension = dimension;
  p.initial_point.resize(dimension);
  for (std::size_t i = 0; i < dimension; ++i)
    p.initial_point[i] = (i % 2 == 0) ? -1.0 : 1.0;
  p.optimum_point.assign(dimension, 1.0);
  p.loss = [](std::span<const double> x) { return rosenbrock(x); };
  p.gradient = [](std::span<const double> x, std::span<double> g) {
    rosenbrock_gradient(x, g);
  };
  p.initial_loss = rosenbrock(p.initial_point);
  p.optimum_loss = rosenbrock(p.optimum_point);
  return p;
}

NoisyOracle::NoisyOracle(std::size_t dimension,
                         std::function<double(std::span<const double>)> clean,
                         double noise_scale, Rng noise_stream)
    : dim_(dimension),
      clean_(std::move(clean)),
      scale_(noise_scale),
      noise_(noise_stream) {
  if (noise_scale < 0.0) throw ConfigError("noise scale must be >= 0");
}

double NoisyOracle::loss(std::span<const double> phi) {
  const double v = clean_(phi);
  if (scale_ == 0.0) return v;
  return v + scale_ * noise_.gaussian();
}

double NoisyOracle::loss_for_logging(std::span<const double> phi) {
  return clean_(phi);
}

double normalized_loss(double l_theta, double l_star, double l_0) {
  const double denom = std::abs(l_star - l_0);
  if (denom == 0.0)
    throw ConfigError("normalized loss undefined: L(optimum) == L(initial)");
  return std::abs(l_star - l_theta) / denom;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * double(values.size() - 1);
  const std::size_t lo = std::size_t(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - double(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) {
  return quantile(std::move(values), 0.5);
}

double ComparisonConfig::a1_for(OptimizerKind kind) const {
  double a1 = 0.0;
  switch (kind) {
    case OptimizerKind::spsa: a1 = a1_spsa; break;
    case OptimizerKind::spsa_gc: a1 = a1_spsa_gc; break;
    case OptimizerKind::rgf: a1 = a1_rgf; break;
    case OptimizerKind::nag: a1 = a1_nag; break;
  }
  return a1 > 0.0 ? a1 : schedule.a1;
}

ComparisonResult run_comparison(const BenchmarkProblem& problem,
                                const ComparisonConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("comparison requires >= 1 seed");
  if (cfg.optimizers.empty())
    throw ConfigError("comparison requires >= 1 optimizer");
  if (cfg.noise_scales.empty())
    throw ConfigError("comparison requires >= 1 noise scale");

  ComparisonResult result;
  for (OptimizerKind kind : cfg.optimizers) {
    if (kind == OptimizerKind::nag && !problem.gradient)
      throw ConfigError("nag reference requires an analytic gradient");
    for (double scale : cfg.noise_scales) {
      for (std::uint64_t seed : cfg.seeds) {
        // Substreams depend on the seed only, so optimizers sharing a seed
        // face identical perturbations and observation noise.
        const Rng run_rng{Rng::mix(seed)};
        NoisyOracle oracle(problem.dimension, problem.loss, scale,
                           run_rng.substream("observation-noise"));

        RunConfig rc;
        rc.kind = kind;
        rc.schedule = cfg.schedule;
        rc.schedule.a1 = cfg.a1_for(kind);
        rc.beta = cfg.beta;
        rc.repeats = cfg.repeats;
        rc.distribution = cfg.distribution;
        rc.sigma = cfg.sigma;
        rc.log_interval = cfg.log_interval;
        if (cfg.iteration_matched)
          rc.max_iterations = cfg.budget;
        else
          rc.max_queries = cfg.budget;

        ComparisonCell cell;
        cell.optimizer = kind;
        cell.seed = seed;
        cell.noise_scale = scale;
        cell.run = run(oracle, problem.initial_point, rc, run_rng,
                       problem.gradient ? &problem.gradient : nullptr);
        cell.normalized.reserve(cell.run.trajectory.size());
        for (const TrajectoryPoint& pt : cell.run.trajectory)
          cell.normalized.push_back(
              normalized_loss(pt.loss, problem.optimum_loss,
                              problem.initial_loss));
        // a diverged run counts as infinitely bad in the order statistics
        if (cell.run.status == RunStatus::diverged)
          cell.final_normalized = std::numeric_limits<double>::infinity();
        else
          cell.final_normalized =
              cell.normalized.empty() ? 1.0 : cell.normalized.back();
        result.cells.push_back(std::move(cell));
      }
    }
  }

  auto finals = [&](OptimizerKind kind, double scale) {
    std::vector<double> v;
    for (const ComparisonCell& c : result.cells)
      if (c.optimizer == kind && c.noise_scale == scale)
        v.push_back(c.final_normalized);
    return v;
  };

  const double base_scale =
      *std::min_element(cfg.noise_scales.begin(), cfg.noise_scales.end());
  for (OptimizerKind kind : cfg.optimizers) {
    for (double scale : cfg.noise_scales) {
      const std::vector<double> v = finals(kind, scale);
      ComparisonSummary s;
      s.optimizer = kind;
      s.noise_scale = scale;
      s.median_final = median(v);
      s.iqr_final = quantile(v, 0.75) - quantile(v, 0.25);
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= double(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      s.variance_final = v.size() > 1 ? var / double(v.size() - 1) : 0.0;
      result.summaries.push_back(s);

      const std::vector<double> base = finals(kind, base_scale);
      std::vector<double> deg(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) deg[i] = v[i] - base[i];
      result.degradations.push_back({kind, scale, median(deg)});
    }
  }
  return result;
}

}  // namespace zop
