#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zop/image.hpp"
#include "zop/params.hpp"
#include "zop/rng.hpp"

namespace zop {

// ---- frozen feature extractor ----

struct EncoderConfig {
  // "spectral": random orthonormal projection of translation-invariant
  //   features (low-frequency DFT magnitudes of the luma plane plus coarse
  //   color pools) -- the desk-scale stand-in for a pretrained encoder.
  // "pixel": random orthonormal projection of the raw pixels.
  std::string kind = "spectral";
  int feature_dim = 100;
  std::uint64_t projection_seed = 1;  // part of the frozen model, not the run
};

class FrozenEncoder {
 public:
  FrozenEncoder(const EncoderConfig& config, int channels, int height,
                int width);

  int feature_dim() const { return config_.feature_dim; }
  const EncoderConfig& config() const { return config_; }

  // Deterministic; output renormalized to L2 norm sqrt(feature_dim).
  std::vector<float> encode(const ImageTensor& x) const;

 private:
  std::vector<float> features(const ImageTensor& x) const;

  EncoderConfig config_;
  int channels_, height_, width_;
  int pre_dim_ = 0;
  std::vector<float> projection_;  // feature_dim x pre_dim, orthonormal rows
  // spectral basis tables
  int freq_ = 0;
  std::vector<float> cos_y_, sin_y_, cos_x_, sin_x_;
};

// ---- learnable decoder ----

struct DecoderConfig {
  int in_channels = 4;  // reshape target for [features || trigger]
  int in_hw = 7;
  int hidden1 = 32;
  int hidden2 = 16;
  int out_channels = 3;
};

struct Segment {
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Flat layout of every learnable parameter: the trigger vector first, then
// the three norm-act-conv blocks in forward order.
struct ParamLayout {
  Segment trigger;
  Segment b1_gamma, b1_beta, b1_dw_w, b1_dw_b, b1_pw_w, b1_pw_b;
  Segment b2_gamma, b2_beta, b2_dw_w, b2_dw_b, b2_pw_w, b2_pw_b;
  Segment b3_gamma, b3_beta, b3_w, b3_b;
  std::size_t total = 0;

  std::vector<std::pair<std::string, Segment>> named() const;
};

ParamLayout make_layout(const DecoderConfig& d, int trigger_dim);

// f32 copy of a flat parameter vector, same layout.
struct DecoderWeights {
  std::vector<float> values;
};

struct GeneratorConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  int trigger_dim = 96;
  double epsilon = 0.3;
  std::uint64_t init_seed = 1;
};

inline constexpr std::size_t kParamBudget = 10000;

// Input-dependent prompt network: frozen encoder features are concatenated
// with the learnable trigger vector, reshaped to a small 3-D map and decoded
// by norm-act-conv blocks with nearest-neighbor upsampling to the input
// resolution. Learnable state (decoder + trigger) lives in a flat
// ParameterVector owned by the optimizer.
class PromptGenerator {
 public:
  PromptGenerator(const GeneratorConfig& config, int channels, int height,
                  int width);

  std::size_t param_count() const { return layout_.total; }
  const ParamLayout& layout() const { return layout_; }
  const GeneratorConfig& config() const { return config_; }
  double epsilon() const { return config_.epsilon; }
  const FrozenEncoder& encoder() const { return encoder_; }

  ParameterVector init_params(Rng rng) const;

  std::vector<float> encode(const ImageTensor& x) const {
    return encoder_.encode(x);
  }

  void load_weights(std::span<const double> params, DecoderWeights& w) const;

  struct Workspace {
    std::vector<float> map_a, map_b, padded, input, conv_tmp;
    ImageTensor prompt;
  };

  // Image-shaped prompt from cached features; shape matches the input.
  // The result lives in the workspace until the next call.
  const ImageTensor& generate_from_features(std::span<const float> features,
                                            const DecoderWeights& w,
                                            Workspace& ws) const;

  ImageTensor generate(const ImageTensor& x,
                       std::span<const double> params) const;

 private:
  GeneratorConfig config_;
  int channels_, height_, width_;
  FrozenEncoder encoder_;
  ParamLayout layout_;
};

// clip(x + epsilon * prompt) into [0, 1], elementwise.
ImageTensor apply_prompt(const ImageTensor& x, const ImageTensor& prompt,
                         double epsilon);

}  // namespace zop
