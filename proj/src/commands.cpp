#include "zop/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <sstream>

#include "zop/adapt.hpp"
#include "zop/benchmarks.hpp"
#include "zop/io.hpp"

namespace zop::cli {

namespace {

void write_sidecar(const std::string& dir) {
  // wall-clock provenance lives here and only here, so every other artifact
  // byte-reproduces on a rerun
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  Json info;
  info["written_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  write_json_file(dir + "/run_info.json", info);
}

Json schedule_json(double a1, double c1, double alpha, double gamma,
                   double offset) {
  Json j;
  j["a1"] = a1;
  j["c1"] = c1;
  j["alpha"] = alpha;
  j["gamma"] = gamma;
  j["stability_offset"] = offset;
  return j;
}

GainSchedule make_schedule(double a1, double c1, double alpha, double gamma,
                           double offset) {
  const GainSchedule s{a1, c1, alpha, gamma, offset};
  s.validate();
  return s;
}

}  // namespace

std::string resolve_out_dir(const std::string& out,
                            const std::string& subcommand) {
  if (!out.empty()) return out;
  const char* root = std::getenv("ZOPROMPT_OUT_ROOT");
  return std::string(root ? root : "runs") + "/" + subcommand;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const BenchArgs& args) {
  if (args.problem != "rosenbrock")
    throw ConfigError("unknown problem '" + args.problem + "'");
  if (args.seeds < 1) throw ConfigError("bench: need >= 1 seed");

  const BenchmarkProblem problem = make_rosenbrock_problem(args.dim);

  ComparisonConfig cfg;
  for (const std::string& name : args.optimizers)
    cfg.optimizers.push_back(parse_optimizer(name));
  cfg.budget = args.budget;
  cfg.iteration_matched = args.iteration_matched;
  for (int s = 0; s < args.seeds; ++s)
    cfg.seeds.push_back(args.seed_base + std::uint64_t(s));
  cfg.noise_scales = args.noise_scales;
  cfg.schedule = make_schedule(args.a1, args.c1, args.alpha, args.gamma,
                               args.stability_offset);
  cfg.a1_spsa = args.a1_spsa;
  cfg.a1_spsa_gc = args.a1_spsa_gc;
  cfg.a1_rgf = args.a1_rgf;
  cfg.a1_nag = args.a1_nag;
  cfg.beta = args.beta;
  cfg.repeats = args.repeats;
  cfg.distribution = parse_perturbation(args.distribution);
  cfg.sigma = args.sigma;
  cfg.log_interval = args.log_interval;

  Json config;
  config["command"] = "bench";
  config["problem"] = args.problem;
  config["dim"] = args.dim;
  config["optimizers"] = args.optimizers;
  config["budget"] = args.budget;
  config["iteration_matched"] = args.iteration_matched;
  config["seeds"] = args.seeds;
  config["seed_base"] = args.seed_base;
  config["noise_scales"] = args.noise_scales;
  config["schedule"] = schedule_json(args.a1, args.c1, args.alpha, args.gamma,
                                     args.stability_offset);
  Json overrides;
  overrides["spsa"] = args.a1_spsa;
  overrides["spsa-gc"] = args.a1_spsa_gc;
  overrides["rgf"] = args.a1_rgf;
  overrides["nag"] = args.a1_nag;
  config["a1_overrides"] = overrides;
  config["beta"] = args.beta;
  config["repeats"] = args.repeats;
  config["distribution"] = args.distribution;
  config["sigma"] = args.sigma;
  config["log_interval"] = args.log_interval;
  const std::string hash = config_hash(config);

  const ComparisonResult result = run_comparison(problem, cfg);

  const std::string dir = resolve_out_dir(args.out, "bench");
  std::filesystem::create_directories(dir);

  std::ostringstream csv;
  csv << "run_id,optimizer,seed,noise_scale,cumulative_queries,loss,"
         "normalized_loss\n";
  for (const ComparisonCell& cell : result.cells) {
    char run_id[96];
    std::snprintf(run_id, sizeof run_id, "%s_s%llu_n%g",
                  optimizer_name(cell.optimizer),
                  (unsigned long long)cell.seed, cell.noise_scale);
    for (std::size_t i = 0; i < cell.run.trajectory.size(); ++i) {
      const TrajectoryPoint& pt = cell.run.trajectory[i];
      csv << run_id << ',' << optimizer_name(cell.optimizer) << ','
          << cell.seed << ',' << format_double(cell.noise_scale) << ','
          << pt.queries << ',' << format_double(pt.loss) << ','
          << format_double(cell.normalized[i]) << '\n';
    }
  }
  write_text_file(dir + "/trajectories.csv", csv.str());

  Json summary;
  summary["artifact_version"] = kArtifactVersion;
  summary["config_hash"] = hash;
  summary["config"] = config;
  Json problem_echo;
  problem_echo["name"] = problem.name;
  problem_echo["dim"] = problem.dimension;
  problem_echo["initial_loss"] = problem.initial_loss;
  problem_echo["optimum_loss"] = problem.optimum_loss;
  summary["problem"] = problem_echo;

  Json planned = Json::object();
  for (OptimizerKind kind : cfg.optimizers) {
    RunConfig rc;
    rc.kind = kind;
    rc.repeats = cfg.repeats;
    if (cfg.iteration_matched)
      rc.max_iterations = cfg.budget;
    else
      rc.max_queries = cfg.budget;
    planned[optimizer_name(kind)] = planned_iterations(rc);
  }
  summary["planned_iterations"] = planned;

  Json rows = Json::array();
  for (const ComparisonSummary& s : result.summaries) {
    Json row;
    row["optimizer"] = optimizer_name(s.optimizer);
    row["noise_scale"] = s.noise_scale;
    row["median_final_normalized_loss"] = s.median_final;
    row["iqr_final_normalized_loss"] = s.iqr_final;
    row["variance_final_normalized_loss"] = s.variance_final;
    rows.push_back(std::move(row));
  }
  summary["results"] = rows;

  Json degradation = Json::array();
  for (const DegradationRow& d : result.degradations) {
    Json row;
    row["optimizer"] = optimizer_name(d.optimizer);
    row["noise_scale"] = d.noise_scale;
    row["median_degradation"] = d.median_degradation;
    degradation.push_back(std::move(row));
  }
  summary["degradation"] = degradation;

  Json statuses = Json::array();
  bool any_group_all_diverged = false;
  for (OptimizerKind kind : cfg.optimizers)
    for (double scale : cfg.noise_scales) {
      int diverged = 0, total = 0;
      for (const ComparisonCell& c : result.cells)
        if (c.optimizer == kind && c.noise_scale == scale) {
          ++total;
          if (c.run.status == RunStatus::diverged) ++diverged;
        }
      Json row;
      row["optimizer"] = optimizer_name(kind);
      row["noise_scale"] = scale;
      row["diverged_seeds"] = diverged;
      row["total_seeds"] = total;
      statuses.push_back(std::move(row));
      if (diverged == total) any_group_all_diverged = true;
    }
  summary["statuses"] = statuses;

  write_json_file(dir + "/summary.json", summary);
  write_sidecar(dir);
  return any_group_all_diverged ? kExitRunFailure : kExitOk;
}

// -------------------------------------------------------------- datagen

namespace {

int parse_ratio(const std::string& ratio) {
  if (ratio == "1:1") return 1;
  if (ratio == "1:4") return 4;
  throw ConfigError("ratio must be 1:1 or 1:4, got '" + ratio + "'");
}

}  // namespace

int cmd_datagen(const DatagenArgs& args) {
  if (args.dataset != "biased" && args.dataset != "loc" &&
      args.dataset != "clean")
    throw ConfigError("dataset must be biased, loc or clean");
  if (!args.procedural_font && (args.idx_images.empty() ||
                                args.idx_labels.empty()))
    throw ConfigError(
        "no IDX files given; pass --idx-images/--idx-labels or "
        "--procedural-font");

  std::unique_ptr<DigitSource> source;
  if (args.procedural_font) {
    source = std::make_unique<ProceduralFontSource>();
  } else {
    source = std::make_unique<IdxDigitSource>(
        load_idx(args.idx_images, args.idx_labels));
  }

  Json config;
  config["command"] = "datagen";
  config["dataset"] = args.dataset;
  config["rho"] = args.rho;
  config["ratio"] = args.ratio;
  config["shots"] = args.shots;
  config["canvas"] = args.canvas;
  config["digit_size"] = args.digit_size;
  config["train_per_class"] = args.train_per_class;
  config["test_per_class"] = args.test_per_class;
  config["source"] = source->name();
  config["random_colors"] = args.random_colors;
  config["seed"] = args.seed;
  const std::string hash = config_hash(config);

  auto build = [&](const std::string& split, int per_class) {
    if (args.dataset == "biased") {
      BiasConfig bias;
      bias.rho = args.rho;
      bias.random_other_colors = args.random_colors;
      return make_biased_mnist(*source, bias, split, per_class, args.canvas,
                               args.digit_size, args.seed);
    }
    if (args.dataset == "loc")
      return make_loc_mnist(*source, parse_ratio(args.ratio), split,
                            per_class, args.canvas, args.digit_size,
                            args.seed);
    return make_clean_digits(*source, split, per_class, args.canvas,
                             args.digit_size, args.seed);
  };

  SyntheticDataset train = build("train", args.train_per_class);
  if (args.shots > 0) train = make_few_shot_split(train, args.shots, args.seed);
  const SyntheticDataset test = build("test", args.test_per_class);

  const std::string dir = resolve_out_dir(args.out, "datagen");
  save_dataset(train, dir + "/train");
  save_dataset(test, dir + "/test");

  Json top;
  top["artifact_version"] = kArtifactVersion;
  top["config_hash"] = hash;
  top["config"] = config;
  top["splits"] = Json::array({"train", "test"});
  top["train_count"] = train.size();
  top["test_count"] = test.size();
  top["train_resamples"] = train.resample_count;
  write_json_file(dir + "/dataset.json", top);
  write_sidecar(dir);
  return kExitOk;
}

// ---------------------------------------------------------------- adapt

int cmd_adapt(const AdaptArgs& args) {
  if (args.data_dir.empty()) throw ConfigError("adapt: --data is required");
  if (!args.train_surrogate && args.surrogate_prefix.empty())
    throw ConfigError("adapt: pass --surrogate PREFIX or --train-surrogate");
  if (!(args.epsilon >= 0.0 && args.epsilon <= 1.0))
    throw ConfigError("adapt: epsilon must be in [0, 1]");
  if (!(args.beta >= 0.0 && args.beta <= 1.0))
    throw ConfigError("adapt: beta must be in [0, 1]");
  if (args.repeats < 1) throw ConfigError("adapt: repeats must be >= 1");

  const SyntheticDataset train = load_dataset(args.data_dir + "/train");
  const SyntheticDataset test = load_dataset(args.data_dir + "/test");

  const std::string dir = resolve_out_dir(args.out, "adapt");
  std::filesystem::create_directories(dir);

  SurrogateModel surrogate;
  if (args.train_surrogate) {
    if (train.source != "procedural")
      throw ConfigError(
          "adapt: --train-surrogate supports procedural-font datasets; "
          "train a surrogate separately for IDX-backed data");
    const ProceduralFontSource font;
    const SyntheticDataset clean_train =
        make_clean_digits(font, "train", 200, train.canvas, train.digit_size,
                          args.surrogate_seed);
    const SyntheticDataset clean_val =
        make_clean_digits(font, "val", 50, train.canvas, train.digit_size,
                          args.surrogate_seed + 1);
    SurrogateConfig scfg;
    scfg.hidden = args.surrogate_hidden;
    scfg.epochs = args.surrogate_epochs;
    surrogate = train_surrogate(clean_train, clean_val, scfg,
                                args.surrogate_seed);
    save_surrogate(surrogate, dir + "/surrogate");
  } else {
    surrogate = load_surrogate(args.surrogate_prefix);
  }

  AdaptConfig cfg;
  cfg.optimizer = parse_optimizer(args.optimizer);
  if (cfg.optimizer == OptimizerKind::nag)
    throw ConfigError("adapt: nag needs true gradients, black-box only here");
  cfg.schedule = make_schedule(args.a1, args.c1, args.alpha, args.gamma,
                               args.stability_offset);
  cfg.beta = args.beta;
  cfg.repeats = args.repeats;
  cfg.distribution = parse_perturbation(args.distribution);
  cfg.sigma = args.sigma;
  cfg.iterations = args.iters;
  cfg.batch_size = args.batch;
  cfg.seed = args.seed;
  cfg.log_interval = args.log_interval;
  cfg.generator.epsilon = args.epsilon;
  cfg.generator.trigger_dim = args.trigger_dim;
  cfg.generator.encoder.kind = args.encoder;
  cfg.generator.encoder.feature_dim = args.feature_dim;
  cfg.generator.decoder.hidden1 = args.hidden1;
  cfg.generator.decoder.hidden2 = args.hidden2;
  cfg.generator.init_seed = args.seed;

  Json config;
  config["command"] = "adapt";
  config["data_dir"] = args.data_dir;
  config["optimizer"] = args.optimizer;
  config["schedule"] = schedule_json(args.a1, args.c1, args.alpha, args.gamma,
                                     args.stability_offset);
  config["beta"] = args.beta;
  config["repeats"] = args.repeats;
  config["distribution"] = args.distribution;
  config["sigma"] = args.sigma;
  config["iters"] = args.iters;
  config["batch"] = args.batch;
  config["epsilon"] = args.epsilon;
  config["encoder"] = args.encoder;
  config["feature_dim"] = args.feature_dim;
  config["trigger_dim"] = args.trigger_dim;
  config["hidden1"] = args.hidden1;
  config["hidden2"] = args.hidden2;
  config["seed"] = args.seed;
  config["log_interval"] = args.log_interval;
  config["surrogate_trained_here"] = args.train_surrogate;
  config["surrogate_hidden"] = args.surrogate_hidden;
  config["surrogate_seed"] = args.surrogate_seed;
  const std::string hash = config_hash(config);

  const AdaptReport report = run_adaptation(train, test, surrogate, cfg);

  std::ostringstream csv;
  csv << "iteration,queries,train_loss\n";
  for (const TrajectoryPoint& pt : report.trajectory)
    csv << pt.iteration << ',' << pt.queries << ','
        << format_double(pt.loss) << '\n';
  write_text_file(dir + "/trajectory.csv", csv.str());

  {
    const PromptGenerator generator(cfg.generator, train.channels,
                                    train.canvas, train.canvas);
    save_generator_params(generator, report.final_params, cfg.seed,
                          dir + "/generator");
  }

  Json out;
  out["artifact_version"] = kArtifactVersion;
  out["config_hash"] = hash;
  out["config"] = config;
  out["status"] =
      report.status == RunStatus::ok ? "ok" : "diverged";
  out["param_count"] = report.param_count;
  out["zero_shot_accuracy"] = report.zero_shot_accuracy;
  out["final_accuracy"] = report.final_accuracy;
  out["initial_train_loss"] = report.initial_train_loss;
  out["final_train_loss"] = report.final_train_loss;
  out["optimization_queries"] = report.optimization_queries;
  out["bookkeeping_queries"] = report.bookkeeping_queries;
  out["expected_queries"] =
      args.iters * queries_per_iteration(cfg.optimizer, cfg.repeats);
  out["surrogate_val_accuracy"] = surrogate.val_accuracy;
  write_json_file(dir + "/report.json", out);
  write_sidecar(dir);

  return report.status == RunStatus::ok ? kExitOk : kExitRunFailure;
}

}  // namespace zop::cli
