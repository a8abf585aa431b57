#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zop/datasets.hpp"
#include "zop/image.hpp"

namespace zop {

// Stand-in for the served black-box model: a single-hidden-layer ReLU
// classifier over raw pixels, trained once on clean centered digits and then
// frozen. The adaptation side sees nothing but logits.
struct SurrogateModel {
  int input_dim = 0;
  int hidden = 0;
  int num_classes = 10;
  double val_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::vector<float> w1, b1, w2, b2;

  void logits(const float* x, float* out, std::vector<float>& scratch) const;
  // n row-major inputs -> n rows of num_classes logits
  void logits_batch(const float* x, std::size_t n, float* out,
                    std::vector<float>& scratch) const;
  int predict(const ImageTensor& img, std::vector<float>& scratch) const;
};

struct SurrogateConfig {
  int hidden = 48;
  int num_classes = 10;
  int epochs = 12;
  int batch_size = 32;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double val_accuracy_floor = 0.90;
};

// SGD with momentum, manual backprop. Throws RunError when the clean
// validation accuracy lands under the floor.
SurrogateModel train_surrogate(const SyntheticDataset& train,
                               const SyntheticDataset& val,
                               const SurrogateConfig& config,
                               std::uint64_t seed);

double surrogate_accuracy(const SurrogateModel& model,
                          const SyntheticDataset& dataset);

// mean(-log softmax(logits)[label]) building block, computed in double
double softmax_cross_entropy(std::span<const float> logits, int label);

// checkpoint = <prefix>.f32 (flat little-endian float array) + <prefix>.json
void save_surrogate(const SurrogateModel& model, const std::string& prefix);
SurrogateModel load_surrogate(const std::string& prefix);

}  // namespace zop
