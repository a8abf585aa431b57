// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL
// line with its measured values and wall time; the binary exits nonzero if
// any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "zop/adapt.hpp"
#include "zop/benchmarks.hpp"
#include "zop/commands.hpp"
#include "zop/io.hpp"
#include "zop/kernels.hpp"

using namespace zop;

namespace {

int g_failures = 0;

struct Criterion {
  int number;
  std::string name;
  double time_limit_s;
};

void report(const Criterion& c, bool pass, const std::string& detail,
            double elapsed_s) {
  if (elapsed_s > c.time_limit_s) {
    pass = false;
  }
  std::printf("[%s] %2d. %-28s %s (%.1f s / limit %.0f s)\n",
              pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
              detail.c_str(), elapsed_s, c.time_limit_s);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run_criterion(const Criterion& c,
                   const std::function<std::pair<bool, std::string>()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = fn();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(c, pass, detail, elapsed);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

std::string temp_dir(const std::string& tag) {
  const auto dir =
      std::filesystem::temp_directory_path() / ("zop-acceptance-" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

// ---- 1. estimator exactness on a random quadratic, d=8 ----

std::pair<bool, std::string> criterion_estimator_exactness() {
  const std::size_t d = 8;
  Rng rng(424242);
  std::vector<double> q(d * d), b(d);
  for (double& v : q) v = rng.uniform(-1, 1);
  for (double& v : b) v = rng.uniform(-1, 1);
  FunctionOracle oracle(d, [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s += x[i] * q[i * d + j] * x[j];
    for (std::size_t i = 0; i < d; ++i) s += b[i] * x[i];
    return s;
  });
  ParameterVector phi(d);
  for (double& v : phi) v = rng.uniform(-1, 1);
  std::vector<double> want(d);
  for (std::size_t i = 0; i < d; ++i) {
    want[i] = b[i];
    for (std::size_t j = 0; j < d; ++j)
      want[i] += (q[i * d + j] + q[j * d + i]) * phi[j];
  }

  ExhaustiveRademacherSampler sampler(d);
  const GradientEstimate est =
      spsa_estimate(oracle, phi, 0.05, sampler, int(sampler.pattern_count()));
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    err += (est.gradient[i] - want[i]) * (est.gradient[i] - want[i]);
    norm += want[i] * want[i];
  }
  const double rel = std::sqrt(err / norm);
  return {rel < 1e-10, fmt("relative error %.2e < 1e-10", rel)};
}

// ---- 2. beta=0 reduction, bitwise, noisy Rosenbrock d=10 ----

std::pair<bool, std::string> criterion_beta_zero() {
  const BenchmarkProblem problem = make_rosenbrock_problem(10);
  int seeds_ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Rng rng{Rng::mix(seed)};
    NoisyOracle o1(10, problem.loss, 0.1, rng.substream("observation-noise"));
    NoisyOracle o2(10, problem.loss, 0.1, rng.substream("observation-noise"));

    RunConfig cfg;
    cfg.schedule = GainSchedule{2e-3, 0.005, 0.6, 0.1, 200.0};
    cfg.repeats = 5;
    cfg.max_iterations = 500;
    cfg.log_interval = 10;

    cfg.kind = OptimizerKind::spsa;
    const RunResult a = run(o1, problem.initial_point, cfg, rng);
    cfg.kind = OptimizerKind::spsa_gc;
    cfg.beta = 0.0;
    const RunResult b = run(o2, problem.initial_point, cfg, rng);

    const bool same =
        a.trajectory.size() == b.trajectory.size() &&
        std::memcmp(a.trajectory.data(), b.trajectory.data(),
                    a.trajectory.size() * sizeof(TrajectoryPoint)) == 0 &&
        std::memcmp(a.state.phi.data(), b.state.phi.data(),
                    10 * sizeof(double)) == 0;
    if (same) ++seeds_ok;
  }
  return {seeds_ok == 10,
          fmt("bitwise-identical trajectories for %d/10 seeds", seeds_ok)};
}

// ---- 3 & 4. Fig. 3 orderings ----

double summary_median(const ComparisonResult& r, OptimizerKind kind,
                      double scale) {
  for (const ComparisonSummary& s : r.summaries)
    if (s.optimizer == kind && s.noise_scale == scale) return s.median_final;
  throw std::runtime_error("missing summary row");
}

double summary_variance(const ComparisonResult& r, OptimizerKind kind,
                        double scale) {
  for (const ComparisonSummary& s : r.summaries)
    if (s.optimizer == kind && s.noise_scale == scale)
      return s.variance_final;
  throw std::runtime_error("missing summary row");
}

double degradation(const ComparisonResult& r, OptimizerKind kind,
                   double scale) {
  for (const DegradationRow& d : r.degradations)
    if (d.optimizer == kind && d.noise_scale == scale)
      return d.median_degradation;
  throw std::runtime_error("missing degradation row");
}

std::pair<bool, std::string> criterion_clean_ordering() {
  const BenchmarkProblem problem = make_rosenbrock_problem(100);
  ComparisonConfig cfg;
  cfg.optimizers = {OptimizerKind::spsa_gc, OptimizerKind::rgf,
                    OptimizerKind::nag};
  cfg.budget = 20000;
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.noise_scales = {0.0};
  cfg.schedule = GainSchedule{2e-4, 0.005, 0.6, 0.1, 200.0};
  cfg.beta = 0.9;
  cfg.repeats = 5;
  cfg.sigma = 0.001;
  cfg.log_interval = 100;

  const ComparisonResult r = run_comparison(problem, cfg);
  const double gc = summary_median(r, OptimizerKind::spsa_gc, 0.0);
  const double rgf = summary_median(r, OptimizerKind::rgf, 0.0);
  const double nag = summary_median(r, OptimizerKind::nag, 0.0);
  const bool pass = gc < rgf && gc <= 10.0 * nag;
  return {pass, fmt("median final: spsa-gc %.4g < rgf %.4g, nag %.4g "
                    "(spsa-gc/nag = %.2fx <= 10x)",
                    gc, rgf, nag, gc / nag)};
}

std::pair<bool, std::string> criterion_noise_ordering() {
  // d=2 keeps observation noise at scale 0.1 comparable to achievable loss
  // differences; per-optimizer LRs mirror the per-algorithm sweep protocol.
  const BenchmarkProblem problem = make_rosenbrock_problem(2);
  ComparisonConfig cfg;
  cfg.optimizers = {OptimizerKind::spsa, OptimizerKind::spsa_gc,
                    OptimizerKind::rgf};
  cfg.budget = 100000;
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.noise_scales = {0.0, 0.001, 0.01, 0.1};
  cfg.schedule = GainSchedule{0.01, 0.005, 0.6, 0.1, 200.0};
  cfg.a1_spsa = 0.05;
  cfg.a1_spsa_gc = 0.005;
  cfg.a1_rgf = 0.05;
  cfg.beta = 0.9;
  cfg.repeats = 5;
  cfg.sigma = 0.003;
  cfg.log_interval = 500;

  const ComparisonResult r = run_comparison(problem, cfg);
  const double d_rgf = degradation(r, OptimizerKind::rgf, 0.1);
  const double d_spsa = degradation(r, OptimizerKind::spsa, 0.1);
  const double d_gc = degradation(r, OptimizerKind::spsa_gc, 0.1);
  bool pass = d_rgf > d_spsa && d_spsa >= d_gc;

  // module invariant: seed variance of the final normalized loss is
  // nondecreasing in the noise scale for the SPSA family
  for (OptimizerKind kind : {OptimizerKind::spsa, OptimizerKind::spsa_gc}) {
    double prev = -1.0;
    for (double scale : cfg.noise_scales) {
      const double v = summary_variance(r, kind, scale);
      if (!(v >= prev)) pass = false;
      prev = v;
    }
  }
  return {pass, fmt("median degradation @0.1: rgf %s > spsa %.4g >= "
                    "spsa-gc %.4g; spsa-family seed variance monotone",
                    std::isfinite(d_rgf) ? fmt("%.4g", d_rgf).c_str()
                                         : "inf (all-seed divergence)",
                    d_spsa, d_gc)};
}

// ---- 5. dataset statistics ----

std::pair<bool, std::string> criterion_dataset_statistics() {
  ProceduralFontSource font;
  bool pass = true;
  std::string detail;

  BiasConfig bias;
  bias.rho = 0.9;
  const int per_class = 400;
  const SyntheticDataset train =
      make_biased_mnist(font, bias, "train", per_class, 64, 16, 11);
  const SyntheticDataset test =
      make_biased_mnist(font, bias, "test", per_class, 64, 16, 12);
  double worst_pull = 0.0;
  for (int cls = 0; cls < 10; ++cls) {
    auto rate = [&](const SyntheticDataset& ds) {
      int hit = 0, total = 0;
      for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds.labels[i] == cls) {
          ++total;
          if (ds.meta[i].bias_color == cls) ++hit;
        }
      return double(hit) / double(total);
    };
    const double se_train = std::sqrt(0.9 * 0.1 / per_class);
    const double pull_train = std::abs(rate(train) - 0.9) / se_train;
    const double pull_test = std::abs(rate(test) - 0.1) / se_train;
    worst_pull = std::max({worst_pull, pull_train, pull_test});
    if (pull_train > 3.0 || pull_test > 3.0) pass = false;
  }
  detail = fmt("bias corr within %.2f SE of 0.9/0.1 (limit 3)", worst_pull);

  // 10k location-shift samples at 1:4: 64x64 fake centered on a 96 canvas,
  // real digit flush against an edge, boxes disjoint, fake classes uniform
  std::vector<int> fake_counts(10, 0);
  std::size_t total = 0;
  bool geometry_ok = true;
  for (std::uint64_t chunk = 0; chunk < 10; ++chunk) {
    const SyntheticDataset ds =
        make_loc_mnist(font, 4, "train", 100, 96, 16, 100 + chunk);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const ImageMeta& m = ds.meta[i];
      ++total;
      fake_counts[m.fake_class]++;
      const bool flush = m.target_x == 0 || m.target_x == 80 ||
                         m.target_y == 0 || m.target_y == 80;
      const int f0 = (96 - 64) / 2;  // fake box [16, 80)
      const bool overlap = m.target_x < f0 + 64 && f0 < m.target_x + 16 &&
                           m.target_y < f0 + 64 && f0 < m.target_y + 16;
      if (!flush || overlap || m.scale_ratio != 4) geometry_ok = false;
    }
  }
  if (total != 10000) geometry_ok = false;
  const double se_fake = std::sqrt(10000 * 0.1 * 0.9);
  for (int c = 0; c < 10; ++c)
    if (std::abs(fake_counts[c] - 1000.0) > 3.0 * se_fake)
      geometry_ok = false;
  if (!geometry_ok) pass = false;
  detail += fmt("; loc 1:4 geometry ok for %zu samples", total);
  return {pass, detail};
}

// ---- 6 & 7. adaptation gain and optimizer comparison ----

struct AdaptFixture {
  SyntheticDataset train, test;
  SurrogateModel surrogate;
};

AdaptFixture make_adapt_fixture() {
  ProceduralFontSource font;
  AdaptFixture f;
  SyntheticDataset pool = make_loc_mnist(font, 1, "train", 200, 64, 16, 1);
  f.train = make_few_shot_split(pool, 16, 1);
  f.test = make_loc_mnist(font, 1, "test", 100, 64, 16, 2);

  // one frozen surrogate serves every adaptation seed, like the single
  // served model it stands in for
  SurrogateConfig scfg;
  scfg.hidden = 32;
  f.surrogate = train_surrogate(
      make_clean_digits(font, "train", 200, 64, 16, 77),
      make_clean_digits(font, "val", 50, 64, 16, 78), scfg, 77);
  return f;
}

AdaptConfig adapt_defaults() {
  AdaptConfig cfg;
  cfg.optimizer = OptimizerKind::spsa_gc;
  cfg.schedule = GainSchedule{1.0, 0.01, 0.6, 0.1, 200.0};
  cfg.beta = 0.9;
  cfg.repeats = 5;
  cfg.iterations = 900;
  cfg.batch_size = 48;
  cfg.generator.epsilon = 0.5;
  cfg.log_interval = 450;
  return cfg;
}

std::pair<bool, std::string> criterion_adaptation_gain(
    const AdaptFixture& f, std::vector<AdaptReport>& gc_reports) {
  std::vector<double> gains;
  double zero_shot = 0.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    AdaptConfig cfg = adapt_defaults();
    cfg.seed = seed;
    const AdaptReport r = run_adaptation(f.train, f.test, f.surrogate, cfg);
    gains.push_back(r.final_accuracy - r.zero_shot_accuracy);
    zero_shot = r.zero_shot_accuracy;
    gc_reports.push_back(r);
  }
  const double med = median(gains);
  return {med >= 0.05,
          fmt("zero-shot %.3f; gains %+.3f %+.3f %+.3f, median %+.3f >= "
              "+0.05",
              zero_shot, gains[0], gains[1], gains[2], med)};
}

std::pair<bool, std::string> criterion_gc_vs_spsa(
    const AdaptFixture& f, const std::vector<AdaptReport>& gc_reports) {
  std::vector<double> gc_loss, spsa_loss;
  for (const AdaptReport& r : gc_reports)
    gc_loss.push_back(r.final_train_loss);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    AdaptConfig cfg = adapt_defaults();
    cfg.optimizer = OptimizerKind::spsa;
    cfg.seed = seed;
    const AdaptReport r = run_adaptation(f.train, f.test, f.surrogate, cfg);
    spsa_loss.push_back(r.final_train_loss);
  }
  const double gc = median(gc_loss), plain = median(spsa_loss);
  return {gc <= plain,
          fmt("median final train loss: spsa-gc %.4f <= spsa %.4f "
              "(matched %llu-query budget)",
              gc, plain,
              (unsigned long long)(adapt_defaults().iterations * 10))};
}

// ---- 8 & 9. parameter budget and query accounting ----

std::pair<bool, std::string> criterion_param_budget(
    const std::vector<AdaptReport>& gc_reports) {
  const GeneratorConfig cfg;  // defaults
  const PromptGenerator gen(cfg, 3, 64, 64);
  bool pass = gen.param_count() < kParamBudget;
  for (const AdaptReport& r : gc_reports)
    if (r.param_count >= kParamBudget) pass = false;
  return {pass, fmt("default coordinator: %zu learnable parameters < 10000",
                    gen.param_count())};
}

std::pair<bool, std::string> criterion_query_accounting(
    const std::vector<AdaptReport>& gc_reports) {
  bool pass = true;
  // SPSA family: 2 * repeats * iters
  FunctionOracle quad(6, [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
  });
  RunConfig rc;
  rc.kind = OptimizerKind::spsa;
  rc.schedule = GainSchedule{1e-3, 0.01, 0.6, 0.1, 0.0};
  rc.repeats = 5;
  rc.max_iterations = 123;
  const RunResult r1 = run(quad, ParameterVector(6, 0.3), rc, Rng(1));
  if (r1.optimization_queries != 2 * 5 * 123) pass = false;

  FunctionOracle quad2(6, [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
  });
  rc.kind = OptimizerKind::rgf;
  rc.sigma = 0.01;
  const RunResult r2 = run(quad2, ParameterVector(6, 0.3), rc, Rng(1));
  if (r2.optimization_queries != (5 + 1) * 123) pass = false;

  // full adaptation runs audited against the closed form
  for (const AdaptReport& r : gc_reports)
    if (r.optimization_queries != adapt_defaults().iterations * 2 * 5)
      pass = false;
  return {pass, fmt("oracle counters equal closed forms (2R*T=%llu, "
                    "(R+1)*T=%llu, adapt %llu)",
                    (unsigned long long)r1.optimization_queries,
                    (unsigned long long)r2.optimization_queries,
                    (unsigned long long)(gc_reports.empty()
                                             ? 0
                                             : gc_reports[0]
                                                   .optimization_queries))};
}

// ---- 10. byte-identical artifacts on rerun ----

std::pair<bool, std::string> criterion_determinism() {
  auto same_file = [](const std::string& a, const std::string& b) {
    return read_text_file(a) == read_text_file(b);
  };
  bool pass = true;

  cli::DatagenArgs dg;
  dg.dataset = "biased";
  dg.rho = 0.9;
  dg.shots = 16;
  dg.train_per_class = 30;
  dg.test_per_class = 10;
  dg.procedural_font = true;
  dg.seed = 5;
  const std::string d1 = temp_dir("det-data1"), d2 = temp_dir("det-data2");
  dg.out = d1;
  cli::cmd_datagen(dg);
  dg.out = d2;
  cli::cmd_datagen(dg);
  for (const char* rel : {"/dataset.json", "/train/manifest.json",
                          "/train/images.u8", "/test/images.u8"})
    pass = pass && same_file(d1 + rel, d2 + rel);

  cli::BenchArgs ba;
  ba.dim = 5;
  ba.optimizers = {"spsa", "spsa-gc", "rgf"};
  ba.budget = 600;
  ba.seeds = 2;
  ba.noise_scales = {0.0, 0.01};
  ba.a1 = 1e-4;
  ba.log_interval = 20;
  const std::string b1 = temp_dir("det-bench1"), b2 = temp_dir("det-bench2");
  ba.out = b1;
  cli::cmd_bench(ba);
  ba.out = b2;
  cli::cmd_bench(ba);
  pass = pass && same_file(b1 + "/trajectories.csv", b2 + "/trajectories.csv");
  pass = pass && same_file(b1 + "/summary.json", b2 + "/summary.json");

  cli::AdaptArgs aa;
  aa.data_dir = d1;
  aa.train_surrogate = true;
  aa.surrogate_hidden = 24;
  aa.surrogate_epochs = 8;
  aa.iters = 5;
  aa.batch = 32;
  aa.hidden1 = 16;
  aa.hidden2 = 8;
  aa.log_interval = 5;
  const std::string a1 = temp_dir("det-adapt1"), a2 = temp_dir("det-adapt2");
  aa.out = a1;
  cli::cmd_adapt(aa);
  aa.out = a2;
  cli::cmd_adapt(aa);
  for (const char* rel : {"/report.json", "/trajectory.csv", "/generator.f32",
                          "/surrogate.f32"})
    pass = pass && same_file(a1 + rel, a2 + rel);

  return {pass, "datagen, bench and adapt artifacts byte-identical on rerun"};
}

}  // namespace

int main() {
  std::printf("acceptance suite (kernel backend: %s)\n",
              kernels::backend_name(kernels::active()));

  run_criterion({1, "estimator exactness", 1},
                criterion_estimator_exactness);
  run_criterion({2, "beta=0 reduction", 5}, criterion_beta_zero);
  run_criterion({3, "clean optimizer ordering", 120},
                criterion_clean_ordering);
  run_criterion({4, "noise-sensitivity ordering", 180},
                criterion_noise_ordering);
  run_criterion({5, "dataset statistics", 30},
                criterion_dataset_statistics);

  AdaptFixture fixture = make_adapt_fixture();
  std::vector<AdaptReport> gc_reports;
  run_criterion({6, "few-shot adaptation gain", 300}, [&] {
    return criterion_adaptation_gain(fixture, gc_reports);
  });
  run_criterion({7, "spsa-gc vs spsa train loss", 600}, [&] {
    return criterion_gc_vs_spsa(fixture, gc_reports);
  });
  run_criterion({8, "parameter budget", 5}, [&] {
    return criterion_param_budget(gc_reports);
  });
  run_criterion({9, "query accounting", 5}, [&] {
    return criterion_query_accounting(gc_reports);
  });
  run_criterion({10, "artifact determinism", 120}, criterion_determinism);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
