#include "zop/adapt.hpp"

#include <algorithm>
#include <fstream>

#include "zop/io.hpp"

namespace zop {

PromptedClassificationOracle::PromptedClassificationOracle(
    const PromptGenerator& generator, const SurrogateModel& surrogate,
    const SyntheticDataset& data)
    : generator_(generator), surrogate_(surrogate), data_(data) {
  if (data.size() == 0) throw DataError("adaptation split is empty");
  if (surrogate.input_dim != data.channels * data.canvas * data.canvas)
    throw ConfigError("surrogate input dimension does not match the dataset");
  for (int label : data.labels)
    if (label < 0 || label >= surrogate.num_classes)
      throw DataError("label " + std::to_string(label) + " outside [0, " +
                      std::to_string(surrogate.num_classes) + ")");

  features_.reserve(data.size());
  for (const ImageTensor& img : data.images)
    features_.push_back(generator.encode(img));
  all_.resize(data.size());
  for (std::size_t i = 0; i < all_.size(); ++i) all_[i] = i;
  batch_ = all_;
  logits_.resize(surrogate.num_classes);
}

void PromptedClassificationOracle::set_batch(
    std::vector<std::size_t> indices) {
  if (indices.empty()) throw ConfigError("empty minibatch");
  batch_ = std::move(indices);
}

std::size_t PromptedClassificationOracle::dimension() const {
  return generator_.param_count();
}

double PromptedClassificationOracle::mean_loss(
    std::span<const double> params, const std::vector<std::size_t>& indices) {
  generator_.load_weights(params, weights_);
  const float epsilon = float(generator_.epsilon());
  const std::size_t pixels = data_.images.front().size();

  // prompt the whole minibatch, then push it through the surrogate in one
  // batched pass (keeps the first-layer weights hot across images)
  pixel_rows_.resize(indices.size() * pixels);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t idx = indices[i];
    const ImageTensor& prompt =
        generator_.generate_from_features(features_[idx], weights_, ws_);
    kernels::add_scaled_clip01_f32(data_.images[idx].data.data(),
                                   prompt.data.data(), epsilon,
                                   pixel_rows_.data() + i * pixels, pixels);
  }
  logits_.resize(indices.size() * std::size_t(surrogate_.num_classes));
  surrogate_.logits_batch(pixel_rows_.data(), indices.size(), logits_.data(),
                          scratch_);

  double sum = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::span<const float> row(
        logits_.data() + i * std::size_t(surrogate_.num_classes),
        std::size_t(surrogate_.num_classes));
    sum += softmax_cross_entropy(row, data_.labels[indices[i]]);
  }
  return sum / double(indices.size());
}

double PromptedClassificationOracle::loss(std::span<const double> params) {
  return mean_loss(params, batch_);
}

double PromptedClassificationOracle::loss_for_logging(
    std::span<const double> params) {
  return mean_loss(params, all_);
}

double prompted_accuracy(const PromptGenerator& generator,
                         std::span<const double> params,
                         const SurrogateModel& surrogate,
                         const SyntheticDataset& data, double epsilon) {
  if (data.size() == 0) throw DataError("accuracy over an empty dataset");
  DecoderWeights weights;
  generator.load_weights(params, weights);
  PromptGenerator::Workspace ws;
  const std::size_t pixels = data.images.front().size();
  const std::size_t chunk = 64;
  std::vector<float> rows, logits, scratch;
  std::size_t hits = 0;
  for (std::size_t start = 0; start < data.size(); start += chunk) {
    const std::size_t stop = std::min(data.size(), start + chunk);
    rows.resize((stop - start) * pixels);
    for (std::size_t i = start; i < stop; ++i) {
      const std::vector<float> z = generator.encode(data.images[i]);
      const ImageTensor& prompt =
          generator.generate_from_features(z, weights, ws);
      kernels::add_scaled_clip01_f32(data.images[i].data.data(),
                                     prompt.data.data(), float(epsilon),
                                     rows.data() + (i - start) * pixels,
                                     pixels);
    }
    logits.resize((stop - start) * std::size_t(surrogate.num_classes));
    surrogate.logits_batch(rows.data(), stop - start, logits.data(), scratch);
    for (std::size_t i = start; i < stop; ++i) {
      const float* row =
          logits.data() + (i - start) * surrogate.num_classes;
      const int pred =
          int(std::max_element(row, row + surrogate.num_classes) - row);
      if (pred == data.labels[i]) ++hits;
    }
  }
  return double(hits) / double(data.size());
}

AdaptReport run_adaptation(const SyntheticDataset& train,
                           const SyntheticDataset& test,
                           const SurrogateModel& surrogate,
                           const AdaptConfig& cfg) {
  const PromptGenerator generator(cfg.generator, train.channels, train.canvas,
                                  train.canvas);
  PromptedClassificationOracle oracle(generator, surrogate, train);

  const Rng run_rng{Rng::mix(cfg.seed) ^ Rng::hash_name("adapt")};
  const ParameterVector initial = generator.init_params(run_rng);

  // per-iteration minibatch; the whole split when batch_size covers it
  Rng batch_rng = run_rng.substream("minibatch");
  std::vector<std::size_t> pool(train.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  const std::size_t batch =
      std::min<std::size_t>(cfg.batch_size, train.size());
  std::function<void(std::uint64_t)> reseat_batch = [&](std::uint64_t) {
    if (batch == train.size()) return;
    for (std::size_t j = 0; j < batch; ++j) {
      const std::size_t pick = j + batch_rng.below(pool.size() - j);
      std::swap(pool[j], pool[pick]);
    }
    std::vector<std::size_t> indices(pool.begin(), pool.begin() + batch);
    std::sort(indices.begin(), indices.end());
    oracle.set_batch(std::move(indices));
  };

  RunConfig rc;
  rc.kind = cfg.optimizer;
  rc.schedule = cfg.schedule;
  rc.beta = cfg.beta;
  rc.repeats = cfg.repeats;
  rc.distribution = cfg.distribution;
  rc.sigma = cfg.sigma;
  rc.max_iterations = cfg.iterations;
  rc.log_interval = cfg.log_interval;

  const RunResult result = run(oracle, initial, rc, run_rng, nullptr,
                               &reseat_batch);

  AdaptReport report;
  report.status = result.status;
  report.trajectory = result.trajectory;
  report.initial_train_loss =
      result.trajectory.empty() ? 0.0 : result.trajectory.front().loss;
  report.final_train_loss =
      result.trajectory.empty() ? 0.0 : result.trajectory.back().loss;
  report.optimization_queries = result.optimization_queries;
  report.bookkeeping_queries = result.bookkeeping_queries;
  report.param_count = generator.param_count();
  report.final_params = result.state.phi;
  report.zero_shot_accuracy = surrogate_accuracy(surrogate, test);
  report.final_accuracy =
      prompted_accuracy(generator, result.state.phi, surrogate, test,
                        generator.epsilon());
  return report;
}

void save_generator_params(const PromptGenerator& generator,
                           std::span<const double> params, std::uint64_t seed,
                           const std::string& prefix) {
  if (params.size() != generator.param_count())
    throw ConfigError("checkpoint: parameter count mismatch");

  Json header;
  header["kind"] = "prompt-generator";
  header["param_count"] = generator.param_count();
  header["trigger_dim"] = generator.config().trigger_dim;
  header["epsilon"] = generator.config().epsilon;
  header["encoder_kind"] = generator.config().encoder.kind;
  header["feature_dim"] = generator.config().encoder.feature_dim;
  header["projection_seed"] = generator.config().encoder.projection_seed;
  Json decoder;
  decoder["in_channels"] = generator.config().decoder.in_channels;
  decoder["in_hw"] = generator.config().decoder.in_hw;
  decoder["hidden1"] = generator.config().decoder.hidden1;
  decoder["hidden2"] = generator.config().decoder.hidden2;
  decoder["out_channels"] = generator.config().decoder.out_channels;
  header["decoder"] = decoder;
  Json segments = Json::array();
  for (const auto& [name, seg] : generator.layout().named()) {
    Json s;
    s["name"] = name;
    s["offset"] = seg.offset;
    s["size"] = seg.size;
    segments.push_back(std::move(s));
  }
  header["segments"] = segments;
  header["seed"] = seed;
  header["config_hash"] = config_hash(header);
  write_json_file(prefix + ".json", header);

  std::vector<float> f32(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) f32[i] = float(params[i]);
  std::ofstream out(prefix + ".f32", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + prefix + ".f32'");
  out.write(reinterpret_cast<const char*>(f32.data()),
            std::streamsize(f32.size() * sizeof(float)));
}

ParameterVector load_generator_params(const PromptGenerator& generator,
                                      const std::string& prefix) {
  const Json header = read_json_file(prefix + ".json");
  if (header.at("kind").get<std::string>() != "prompt-generator")
    throw DataError(prefix + ".json: not a generator checkpoint");
  const std::size_t count = header.at("param_count").get<std::size_t>();
  if (count != generator.param_count())
    throw ConfigError(prefix + ": checkpoint has " + std::to_string(count) +
                      " parameters, generator expects " +
                      std::to_string(generator.param_count()));

  std::vector<float> f32(count);
  std::ifstream in(prefix + ".f32", std::ios::binary);
  if (!in) throw DataError("cannot read '" + prefix + ".f32'");
  in.read(reinterpret_cast<char*>(f32.data()),
          std::streamsize(f32.size() * sizeof(float)));
  if (!in || in.peek() != EOF)
    throw ParseError(prefix + ".f32: size does not match param_count");

  ParameterVector params(count);
  for (std::size_t i = 0; i < count; ++i) params[i] = double(f32[i]);
  return params;
}

}  // namespace zop
