#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kArtifactVersion = "1";

// ---- bench: optimizer comparison on a test function ----

struct BenchArgs {
  std::string problem = "rosenbrock";
  int dim = 100;
  std::vector<std::string> optimizers = {"spsa", "spsa-gc", "rgf", "nag"};
  std::uint64_t budget = 20000;
  bool iteration_matched = false;
  int seeds = 5;
  std::uint64_t seed_base = 1;
  std::vector<double> noise_scales = {0.0};
  // gains tuned for the d=100 Rosenbrock run; sweepable per invocation
  double a1 = 2e-4;
  double a1_spsa = 0.0;  // per-optimizer overrides, 0 = use --a1
  double a1_spsa_gc = 0.0;
  double a1_rgf = 0.0;
  double a1_nag = 0.0;
  double c1 = 0.005;
  double alpha = 0.6;
  double gamma = 0.1;
  double stability_offset = 200.0;
  double beta = 0.9;
  int repeats = 5;
  std::string distribution = "segmented-uniform";
  double sigma = 0.001;
  std::uint64_t log_interval = 50;
  std::string out;
};

int cmd_bench(const BenchArgs& args);

// ---- datagen: synthetic dataset construction ----

struct DatagenArgs {
  std::string dataset = "biased";  // biased | loc | clean
  double rho = 0.9;
  std::string ratio = "1:1";
  int shots = 0;  // 0 keeps the full train split
  int canvas = 64;
  int digit_size = 16;
  int train_per_class = 200;
  int test_per_class = 100;
  bool procedural_font = false;
  std::string idx_images;
  std::string idx_labels;
  bool random_colors = false;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_datagen(const DatagenArgs& args);

// ---- adapt: black-box prompt adaptation on a generated dataset ----

struct AdaptArgs {
  std::string data_dir;
  std::string surrogate_prefix;  // load when set
  bool train_surrogate = false;
  int surrogate_hidden = 48;
  int surrogate_epochs = 12;
  std::uint64_t surrogate_seed = 1;

  std::string optimizer = "spsa-gc";
  double a1 = 0.01;
  double c1 = 0.005;
  double alpha = 0.6;
  double gamma = 0.1;
  double stability_offset = 0.0;
  double beta = 0.9;
  int repeats = 5;
  std::string distribution = "segmented-uniform";
  double sigma = 0.5;
  std::uint64_t iters = 1000;
  std::uint64_t batch = 64;
  double epsilon = 0.3;

  std::string encoder = "spectral";
  int feature_dim = 100;
  int trigger_dim = 96;
  int hidden1 = 32;
  int hidden2 = 16;

  std::uint64_t seed = 1;
  std::uint64_t log_interval = 50;
  std::string out;
};

int cmd_adapt(const AdaptArgs& args);

// default output root: $ZOPROMPT_OUT_ROOT, falling back to ./runs
std::string resolve_out_dir(const std::string& out,
                            const std::string& subcommand);

}  // namespace zop::cli
