#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "zop/commands.hpp"
#include "zop/errors.hpp"
#include "zop/kernels.hpp"

using namespace zop;

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order optimization and black-box prompt adaptation"};
  app.require_subcommand(1);

  cli::BenchArgs bench;
  CLI::App* cb = app.add_subcommand(
      "bench", "compare optimizers on a benchmark function");
  cb->add_option("--problem", bench.problem, "benchmark function")
      ->capture_default_str();
  cb->add_option("--dim", bench.dim)->capture_default_str();
  cb->add_option("--optimizers", bench.optimizers,
                 "comma-separated: spsa,spsa-gc,rgf,nag")
      ->delimiter(',')
      ->capture_default_str();
  cb->add_option("--budget", bench.budget, "query budget per optimizer")
      ->capture_default_str();
  cb->add_flag("--iteration-matched", bench.iteration_matched,
               "budget counts iterations instead of queries");
  cb->add_option("--seeds", bench.seeds)->capture_default_str();
  cb->add_option("--seed-base", bench.seed_base)->capture_default_str();
  cb->add_option("--noise-scales", bench.noise_scales)
      ->delimiter(',')
      ->capture_default_str();
  cb->add_option("--a1", bench.a1)->capture_default_str();
  cb->add_option("--a1-spsa", bench.a1_spsa, "per-optimizer LR override");
  cb->add_option("--a1-spsa-gc", bench.a1_spsa_gc);
  cb->add_option("--a1-rgf", bench.a1_rgf);
  cb->add_option("--a1-nag", bench.a1_nag);
  cb->add_option("--c1", bench.c1)->capture_default_str();
  cb->add_option("--alpha", bench.alpha)->capture_default_str();
  cb->add_option("--gamma", bench.gamma)->capture_default_str();
  cb->add_option("--stability-offset", bench.stability_offset)
      ->capture_default_str();
  cb->add_option("--beta", bench.beta)->capture_default_str();
  cb->add_option("--repeats", bench.repeats)->capture_default_str();
  cb->add_option("--distribution", bench.distribution)
      ->capture_default_str();
  cb->add_option("--sigma", bench.sigma, "rgf smoothing radius")
      ->capture_default_str();
  cb->add_option("--log-interval", bench.log_interval)
      ->capture_default_str();
  cb->add_option("--out", bench.out, "output directory");

  cli::DatagenArgs datagen;
  CLI::App* cd =
      app.add_subcommand("datagen", "generate a synthetic digit dataset");
  cd->add_option("--dataset", datagen.dataset, "biased | loc | clean")
      ->capture_default_str();
  cd->add_option("--rho", datagen.rho, "train color-label correlation")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cd->add_option("--ratio", datagen.ratio, "fake:real digit scale, 1:1 or 1:4")
      ->capture_default_str();
  cd->add_option("--shots", datagen.shots,
                 "few-shot K per class (0 = full train split)")
      ->capture_default_str();
  cd->add_option("--canvas", datagen.canvas)->capture_default_str();
  cd->add_option("--digit-size", datagen.digit_size)->capture_default_str();
  cd->add_option("--train-per-class", datagen.train_per_class)
      ->capture_default_str();
  cd->add_option("--test-per-class", datagen.test_per_class)
      ->capture_default_str();
  cd->add_flag("--procedural-font", datagen.procedural_font,
               "use the built-in glyph font instead of IDX files");
  cd->add_option("--idx-images", datagen.idx_images, "IDX image file");
  cd->add_option("--idx-labels", datagen.idx_labels, "IDX label file");
  cd->add_flag("--random-colors", datagen.random_colors,
               "uncorrelated backgrounds use arbitrary colors, not the "
               "remaining palette");
  cd->add_option("--seed", datagen.seed)->capture_default_str();
  cd->add_option("--out", datagen.out, "output directory");

  cli::AdaptArgs adapt;
  CLI::App* ca = app.add_subcommand(
      "adapt", "adapt a frozen surrogate with a generated visual prompt");
  ca->add_option("--data", adapt.data_dir, "dataset directory from datagen")
      ->required();
  ca->add_option("--surrogate", adapt.surrogate_prefix,
                 "surrogate checkpoint prefix");
  ca->add_flag("--train-surrogate", adapt.train_surrogate,
               "train and freeze a surrogate before adapting");
  ca->add_option("--surrogate-hidden", adapt.surrogate_hidden)
      ->capture_default_str();
  ca->add_option("--surrogate-epochs", adapt.surrogate_epochs)
      ->capture_default_str();
  ca->add_option("--surrogate-seed", adapt.surrogate_seed)
      ->capture_default_str();
  ca->add_option("--optimizer", adapt.optimizer, "spsa | spsa-gc | rgf")
      ->capture_default_str();
  ca->add_option("--a1", adapt.a1)->capture_default_str();
  ca->add_option("--c1", adapt.c1)->capture_default_str();
  ca->add_option("--alpha", adapt.alpha)->capture_default_str();
  ca->add_option("--gamma", adapt.gamma)->capture_default_str();
  ca->add_option("--stability-offset", adapt.stability_offset)
      ->capture_default_str();
  ca->add_option("--beta", adapt.beta)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ca->add_option("--repeats", adapt.repeats)->capture_default_str();
  ca->add_option("--distribution", adapt.distribution)
      ->capture_default_str();
  ca->add_option("--sigma", adapt.sigma)->capture_default_str();
  ca->add_option("--iters", adapt.iters)->capture_default_str();
  ca->add_option("--batch", adapt.batch)->capture_default_str();
  ca->add_option("--epsilon", adapt.epsilon, "prompt intensity")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ca->add_option("--encoder", adapt.encoder, "spectral | pixel")
      ->capture_default_str();
  ca->add_option("--feature-dim", adapt.feature_dim)->capture_default_str();
  ca->add_option("--trigger-dim", adapt.trigger_dim)->capture_default_str();
  ca->add_option("--hidden1", adapt.hidden1)->capture_default_str();
  ca->add_option("--hidden2", adapt.hidden2)->capture_default_str();
  ca->add_option("--seed", adapt.seed)->capture_default_str();
  ca->add_option("--log-interval", adapt.log_interval)
      ->capture_default_str();
  ca->add_option("--out", adapt.out, "output directory");

  CLI::App* ck = app.add_subcommand("kernels", "report the kernel backend");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    if (cb->parsed()) return cli::cmd_bench(bench);
    if (cd->parsed()) return cli::cmd_datagen(datagen);
    if (ca->parsed()) return cli::cmd_adapt(adapt);
    if (ck->parsed()) {
      std::printf("active: %s (avx2 %s)\n",
                  kernels::backend_name(kernels::active()),
                  kernels::supported(kernels::Backend::avx2) ? "available"
                                                             : "unavailable");
      return cli::kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitUsage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitUsage;
  } catch (const RunError& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return cli::kExitRunFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return cli::kExitRunFailure;
  }
  return cli::kExitUsage;
}
