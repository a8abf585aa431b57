#include <doctest.h>

#include <cmath>
#include <cstring>

#include "zop/benchmarks.hpp"

using namespace zop;

TEST_CASE("rosenbrock plug-in values") {
  ParameterVector ones(100, 1.0);
  CHECK(rosenbrock(ones) == 0.0);

  ParameterVector origin{0.0, 0.0};
  CHECK(rosenbrock(origin) == 1.0);

  ParameterVector start{-1.0, 1.0};
  CHECK(rosenbrock(start) == 4.0);  // 100*(1-1)^2 + (1-(-1))^2

  ParameterVector tiny{0.5};
  CHECK_THROWS_AS(rosenbrock(tiny), ConfigError);
}

TEST_CASE("rosenbrock gradient agrees with central differences") {
  const std::size_t d = 6;
  ParameterVector x{-1.0, 0.8, 0.3, -0.2, 1.1, 0.9};
  ParameterVector g(d);
  rosenbrock_gradient(x, g);

  const double h = 1e-6;
  for (std::size_t i = 0; i < d; ++i) {
    ParameterVector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (rosenbrock(xp) - rosenbrock(xm)) / (2.0 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("normalized loss endpoints and scaling") {
  CHECK(normalized_loss(4.0, 0.0, 4.0) == 1.0);   // at the start
  CHECK(normalized_loss(0.0, 0.0, 4.0) == 0.0);   // at the optimum
  CHECK(normalized_loss(1.0, 0.0, 4.0) == 0.25);
  CHECK_THROWS_AS(normalized_loss(1.0, 2.0, 2.0), ConfigError);
}

TEST_CASE("noisy oracle with scale zero is bit-identical to the clean one") {
  const BenchmarkProblem p = make_rosenbrock_problem(5);
  NoisyOracle noisy(5, p.loss, 0.0, Rng(123));
  ParameterVector x{0.1, -0.4, 0.9, 1.2, -1.0};
  for (int i = 0; i < 10; ++i) {
    const double a = noisy.evaluate(x);
    const double b = p.loss(x);
    CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
    x[0] += 0.05;
  }
}

TEST_CASE("noisy oracle logs the clean loss") {
  const BenchmarkProblem p = make_rosenbrock_problem(3);
  NoisyOracle noisy(3, p.loss, 0.5, Rng(9));
  ParameterVector x{0.2, 0.2, 0.2};
  const double clean = p.loss(x);
  CHECK(noisy.evaluate_bookkeeping(x) == clean);
  bool saw_noise = false;
  for (int i = 0; i < 8; ++i)
    if (noisy.evaluate(x) != clean) saw_noise = true;
  CHECK(saw_noise);
}

TEST_CASE("rosenbrock problem fixture") {
  const BenchmarkProblem p = make_rosenbrock_problem(100);
  CHECK(p.initial_point[0] == -1.0);
  CHECK(p.initial_point[1] == 1.0);
  CHECK(p.initial_point[98] == -1.0);
  CHECK(p.optimum_loss == 0.0);
  CHECK(p.initial_loss > 0.0);
  CHECK(p.initial_point != p.optimum_point);
  // optimum spot check against random probes
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    ParameterVector probe(100);
    for (double& v : probe) v = rng.uniform(-2, 2);
    CHECK(p.loss(probe) >= p.optimum_loss);
  }
}

TEST_CASE("quantiles are deterministic and interpolated") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(median(v) == 2.5);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(median({5.0, 1.0, 9.0}) == 5.0);
}

TEST_CASE("comparison runner produces aligned tables") {
  const BenchmarkProblem p = make_rosenbrock_problem(4);
  ComparisonConfig cfg;
  cfg.optimizers = {OptimizerKind::spsa, OptimizerKind::spsa_gc};
  cfg.budget = 400;
  cfg.seeds = {1, 2, 3};
  cfg.noise_scales = {0.0, 0.1};
  cfg.schedule = GainSchedule{.a1 = 1e-4, .c1 = 0.01, .alpha = 0.6,
                              .gamma = 0.1, .stability_offset = 0.0};
  cfg.repeats = 5;
  cfg.log_interval = 10;

  const ComparisonResult r = run_comparison(p, cfg);
  CHECK(r.cells.size() == 2 * 3 * 2);

  // identical query axes for both optimizers under a matched budget
  const ComparisonCell& first = r.cells.front();
  for (const ComparisonCell& c : r.cells) {
    REQUIRE(c.run.trajectory.size() == first.run.trajectory.size());
    for (std::size_t i = 0; i < c.run.trajectory.size(); ++i)
      CHECK(c.run.trajectory[i].queries == first.run.trajectory[i].queries);
    // normalized loss starts at 1 and stays nonnegative
    CHECK(c.normalized.front() == 1.0);
    for (double n : c.normalized) CHECK(n >= 0.0);
  }
  CHECK(r.summaries.size() == 2 * 2);

  ComparisonConfig bad = cfg;
  bad.seeds.clear();
  CHECK_THROWS_AS(run_comparison(p, bad), ConfigError);
}
