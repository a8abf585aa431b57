#include "zop/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "zop/errors.hpp"
#include "zop/io.hpp"
#include "zop/kernels.hpp"
#include "zop/rng.hpp"

namespace zop {

void SurrogateModel::logits(const float* x, float* out,
                            std::vector<float>& scratch) const {
  scratch.resize(hidden);
  kernels::matvec_f32(w1.data(), hidden, input_dim, x, b1.data(),
                      scratch.data());
  for (float& v : scratch)
    if (v < 0.0f) v = 0.0f;
  kernels::matvec_f32(w2.data(), num_classes, hidden, scratch.data(),
                      b2.data(), out);
}

void SurrogateModel::logits_batch(const float* x, std::size_t n, float* out,
                                  std::vector<float>& scratch) const {
  scratch.resize(n * std::size_t(hidden));
  kernels::matmul_f32(w1.data(), hidden, input_dim, x, n, b1.data(),
                      scratch.data());
  for (float& v : scratch)
    if (v < 0.0f) v = 0.0f;
  kernels::matmul_f32(w2.data(), num_classes, hidden, scratch.data(), n,
                      b2.data(), out);
}

int SurrogateModel::predict(const ImageTensor& img,
                            std::vector<float>& scratch) const {
  std::vector<float> out(num_classes);
  logits(img.data.data(), out.data(), scratch);
  return int(std::max_element(out.begin(), out.end()) - out.begin());
}

double softmax_cross_entropy(std::span<const float> logits, int label) {
  if (label < 0 || label >= int(logits.size()))
    throw DataError("label " + std::to_string(label) + " outside [0, " +
                    std::to_string(logits.size()) + ")");
  double max = logits[0];
  for (float v : logits) max = std::max(max, double(v));
  double sum = 0.0;
  for (float v : logits) sum += std::exp(double(v) - max);
  return std::log(sum) - (double(logits[label]) - max);
}

double surrogate_accuracy(const SurrogateModel& model,
                          const SyntheticDataset& dataset) {
  if (dataset.size() == 0) throw DataError("accuracy over an empty dataset");
  std::vector<float> scratch, batch, logits;
  std::size_t hits = 0;
  const std::size_t chunk = 64;
  for (std::size_t start = 0; start < dataset.size(); start += chunk) {
    const std::size_t stop = std::min(dataset.size(), start + chunk);
    batch.resize((stop - start) * std::size_t(model.input_dim));
    for (std::size_t i = start; i < stop; ++i)
      std::copy(dataset.images[i].data.begin(), dataset.images[i].data.end(),
                batch.begin() + (i - start) * model.input_dim);
    logits.resize((stop - start) * std::size_t(model.num_classes));
    model.logits_batch(batch.data(), stop - start, logits.data(), scratch);
    for (std::size_t i = start; i < stop; ++i) {
      const float* row = logits.data() + (i - start) * model.num_classes;
      const int pred =
          int(std::max_element(row, row + model.num_classes) - row);
      if (pred == dataset.labels[i]) ++hits;
    }
  }
  return double(hits) / double(dataset.size());
}

SurrogateModel train_surrogate(const SyntheticDataset& train,
                               const SyntheticDataset& val,
                               const SurrogateConfig& config,
                               std::uint64_t seed) {
  if (train.size() == 0) throw DataError("surrogate: empty training set");
  const int input_dim = train.channels * train.canvas * train.canvas;
  const int hidden = config.hidden;
  const int classes = config.num_classes;

  SurrogateModel m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.num_classes = classes;
  m.seed = seed;

  Rng init = Rng(Rng::mix(seed)).substream("surrogate-init");
  m.w1.resize(std::size_t(hidden) * input_dim);
  m.b1.assign(hidden, 0.0f);
  m.w2.resize(std::size_t(classes) * hidden);
  m.b2.assign(classes, 0.0f);
  const float s1 = std::sqrt(2.0f / float(input_dim));
  for (float& v : m.w1) v = s1 * float(init.gaussian());
  const float s2 = std::sqrt(2.0f / float(hidden));
  for (float& v : m.w2) v = s2 * float(init.gaussian());

  std::vector<float> gw1(m.w1.size()), gb1(hidden), gw2(m.w2.size()),
      gb2(classes);
  std::vector<float> vw1(m.w1.size(), 0.0f), vb1(hidden, 0.0f),
      vw2(m.w2.size(), 0.0f), vb2(classes, 0.0f);
  std::vector<float> pre(hidden), act(hidden), out(classes), dh(hidden);

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffle = Rng(Rng::mix(seed)).substream("surrogate-shuffle");

  const float mom = float(config.momentum);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle.below(i)]);

    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + config.batch_size);
      std::fill(gw1.begin(), gw1.end(), 0.0f);
      std::fill(gb1.begin(), gb1.end(), 0.0f);
      std::fill(gw2.begin(), gw2.end(), 0.0f);
      std::fill(gb2.begin(), gb2.end(), 0.0f);

      for (std::size_t k = start; k < stop; ++k) {
        const float* x = train.images[order[k]].data.data();
        const int label = train.labels[order[k]];

        kernels::matvec_f32(m.w1.data(), hidden, input_dim, x, m.b1.data(),
                            pre.data());
        for (int j = 0; j < hidden; ++j)
          act[j] = pre[j] > 0.0f ? pre[j] : 0.0f;
        kernels::matvec_f32(m.w2.data(), classes, hidden, act.data(),
                            m.b2.data(), out.data());

        // softmax - onehot
        float maxv = out[0];
        for (float v : out) maxv = std::max(maxv, v);
        float sum = 0.0f;
        for (int c = 0; c < classes; ++c) {
          out[c] = std::exp(out[c] - maxv);
          sum += out[c];
        }
        for (int c = 0; c < classes; ++c) out[c] /= sum;
        out[label] -= 1.0f;

        for (int c = 0; c < classes; ++c) {
          kernels::axpy_f32(out[c], act.data(),
                            gw2.data() + std::size_t(c) * hidden, hidden);
          gb2[c] += out[c];
        }
        std::fill(dh.begin(), dh.end(), 0.0f);
        for (int c = 0; c < classes; ++c)
          kernels::axpy_f32(out[c], m.w2.data() + std::size_t(c) * hidden,
                            dh.data(), hidden);
        for (int j = 0; j < hidden; ++j)
          if (pre[j] <= 0.0f) dh[j] = 0.0f;
        for (int j = 0; j < hidden; ++j) {
          if (dh[j] != 0.0f)
            kernels::axpy_f32(dh[j], x, gw1.data() + std::size_t(j) * input_dim,
                              input_dim);
          gb1[j] += dh[j];
        }
      }

      const float step = -float(config.learning_rate) / float(stop - start);
      auto update = [&](std::vector<float>& w, std::vector<float>& v,
                        const std::vector<float>& g) {
        kernels::affine_f32(v.data(), mom, 0.0f, v.data(), v.size());
        kernels::axpy_f32(step, g.data(), v.data(), v.size());
        kernels::axpy_f32(1.0f, v.data(), w.data(), w.size());
      };
      update(m.w1, vw1, gw1);
      update(m.b1, vb1, gb1);
      update(m.w2, vw2, gw2);
      update(m.b2, vb2, gb2);
    }
  }

  m.val_accuracy = surrogate_accuracy(m, val);
  if (m.val_accuracy < config.val_accuracy_floor)
    throw RunError("surrogate training reached validation accuracy " +
                   format_double(m.val_accuracy) + ", below the floor " +
                   format_double(config.val_accuracy_floor) +
                   " (train size " + std::to_string(train.size()) + ", " +
                   std::to_string(config.epochs) + " epochs)");
  return m;
}

void save_surrogate(const SurrogateModel& m, const std::string& prefix) {
  Json header;
  header["kind"] = "surrogate";
  header["input_dim"] = m.input_dim;
  header["hidden"] = m.hidden;
  header["num_classes"] = m.num_classes;
  header["val_accuracy"] = m.val_accuracy;
  header["seed"] = m.seed;
  Json cfg;
  cfg["input_dim"] = m.input_dim;
  cfg["hidden"] = m.hidden;
  cfg["num_classes"] = m.num_classes;
  cfg["seed"] = m.seed;
  header["config_hash"] = config_hash(cfg);
  write_json_file(prefix + ".json", header);

  std::ofstream out(prefix + ".f32", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + prefix + ".f32'");
  auto dump = [&](const std::vector<float>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              std::streamsize(v.size() * sizeof(float)));
  };
  dump(m.w1);
  dump(m.b1);
  dump(m.w2);
  dump(m.b2);
}

SurrogateModel load_surrogate(const std::string& prefix) {
  const Json header = read_json_file(prefix + ".json");
  if (header.at("kind").get<std::string>() != "surrogate")
    throw DataError(prefix + ".json: not a surrogate checkpoint");

  SurrogateModel m;
  m.input_dim = header.at("input_dim").get<int>();
  m.hidden = header.at("hidden").get<int>();
  m.num_classes = header.at("num_classes").get<int>();
  m.val_accuracy = header.at("val_accuracy").get<double>();
  m.seed = header.at("seed").get<std::uint64_t>();

  m.w1.resize(std::size_t(m.hidden) * m.input_dim);
  m.b1.resize(m.hidden);
  m.w2.resize(std::size_t(m.num_classes) * m.hidden);
  m.b2.resize(m.num_classes);

  std::ifstream in(prefix + ".f32", std::ios::binary);
  if (!in) throw DataError("cannot read '" + prefix + ".f32'");
  auto slurp = [&](std::vector<float>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            std::streamsize(v.size() * sizeof(float)));
  };
  slurp(m.w1);
  slurp(m.b1);
  slurp(m.w2);
  slurp(m.b2);
  if (!in || in.peek() != EOF)
    throw ParseError(prefix + ".f32: size does not match the header shapes");
  return m;
}

}  // namespace zop
