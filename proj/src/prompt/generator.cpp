#include <cmath>

#include "zop/errors.hpp"
#include "zop/kernels.hpp"
#include "zop/prompt.hpp"

namespace zop {

namespace {

Segment next(std::size_t& at, std::size_t size) {
  const Segment s{at, size};
  at += size;
  return s;
}

// instance-style channel norm + affine: x <- (x - mean)/sqrt(var+eps) * g + b
void channel_norm(float* plane, std::size_t n, float gamma, float beta) {
  const float mean = kernels::sum_f32(plane, n) / float(n);
  float var = kernels::dot_f32(plane, plane, n) / float(n) - mean * mean;
  if (var < 0.0f) var = 0.0f;
  const float inv = 1.0f / std::sqrt(var + 1e-5f);
  const float a = gamma * inv;
  kernels::affine_f32(plane, a, beta - mean * a, plane, n);
}

void pad_plane(const float* src, int hw, std::vector<float>& padded) {
  const int pw = hw + 2;
  padded.assign(std::size_t(pw) * pw, 0.0f);
  for (int y = 0; y < hw; ++y)
    for (int x = 0; x < hw; ++x)
      padded[std::size_t(y + 1) * pw + x + 1] = src[std::size_t(y) * hw + x];
}

void upsample2x(const float* src, int channels, int hw, float* dst) {
  const int out = hw * 2;
  for (int c = 0; c < channels; ++c) {
    const float* sp = src + std::size_t(c) * hw * hw;
    float* dp = dst + std::size_t(c) * out * out;
    for (int y = 0; y < out; ++y)
      for (int x = 0; x < out; ++x)
        dp[std::size_t(y) * out + x] = sp[std::size_t(y / 2) * hw + x / 2];
  }
}

}  // namespace

std::vector<std::pair<std::string, Segment>> ParamLayout::named() const {
  return {{"trigger", trigger},
          {"b1_gamma", b1_gamma}, {"b1_beta", b1_beta},
          {"b1_dw_w", b1_dw_w},   {"b1_dw_b", b1_dw_b},
          {"b1_pw_w", b1_pw_w},   {"b1_pw_b", b1_pw_b},
          {"b2_gamma", b2_gamma}, {"b2_beta", b2_beta},
          {"b2_dw_w", b2_dw_w},   {"b2_dw_b", b2_dw_b},
          {"b2_pw_w", b2_pw_w},   {"b2_pw_b", b2_pw_b},
          {"b3_gamma", b3_gamma}, {"b3_beta", b3_beta},
          {"b3_w", b3_w},         {"b3_b", b3_b}};
}

ParamLayout make_layout(const DecoderConfig& d, int trigger_dim) {
  ParamLayout l;
  std::size_t at = 0;
  l.trigger = next(at, trigger_dim);
  l.b1_gamma = next(at, d.in_channels);
  l.b1_beta = next(at, d.in_channels);
  l.b1_dw_w = next(at, std::size_t(d.in_channels) * 9);
  l.b1_dw_b = next(at, d.in_channels);
  l.b1_pw_w = next(at, std::size_t(d.hidden1) * d.in_channels);
  l.b1_pw_b = next(at, d.hidden1);
  l.b2_gamma = next(at, d.hidden1);
  l.b2_beta = next(at, d.hidden1);
  l.b2_dw_w = next(at, std::size_t(d.hidden1) * 9);
  l.b2_dw_b = next(at, d.hidden1);
  l.b2_pw_w = next(at, std::size_t(d.hidden2) * d.hidden1);
  l.b2_pw_b = next(at, d.hidden2);
  l.b3_gamma = next(at, d.hidden2);
  l.b3_beta = next(at, d.hidden2);
  l.b3_w = next(at, std::size_t(d.out_channels) * d.hidden2 * 9);
  l.b3_b = next(at, d.out_channels);
  l.total = at;
  return l;
}

PromptGenerator::PromptGenerator(const GeneratorConfig& config, int channels,
                                 int height, int width)
    : config_(config),
      channels_(channels),
      height_(height),
      width_(width),
      encoder_(config.encoder, channels, height, width) {
  config_.decoder.out_channels = channels;
  const DecoderConfig& d = config_.decoder;
  if (d.in_channels < 1 || d.in_hw < 1 || d.hidden1 < 1 || d.hidden2 < 1)
    throw ConfigError("generator: bad decoder shape");

  const int map_size = d.in_channels * d.in_hw * d.in_hw;
  if (config_.encoder.feature_dim + config_.trigger_dim != map_size)
    throw ConfigError(
        "generator: feature_dim + trigger_dim = " +
        std::to_string(config_.encoder.feature_dim + config_.trigger_dim) +
        " does not reshape to " + std::to_string(d.in_channels) + "x" +
        std::to_string(d.in_hw) + "x" + std::to_string(d.in_hw));

  layout_ = make_layout(config_.decoder, config_.trigger_dim);
  if (layout_.total >= kParamBudget)
    throw ConfigError("generator: " + std::to_string(layout_.total) +
                      " learnable parameters exceeds the " +
                      std::to_string(kParamBudget) + " budget");
}

ParameterVector PromptGenerator::init_params(Rng rng) const {
  Rng stream = rng.substream("generator-init");
  const DecoderConfig& d = config_.decoder;
  ParameterVector p(layout_.total, 0.0);

  auto fill_gaussian = [&](Segment seg, double stddev) {
    for (std::size_t i = 0; i < seg.size; ++i)
      p[seg.offset + i] = stddev * stream.gaussian();
  };
  auto fill_const = [&](Segment seg, double v) {
    for (std::size_t i = 0; i < seg.size; ++i) p[seg.offset + i] = v;
  };

  fill_gaussian(layout_.trigger, 1.0);
  fill_const(layout_.b1_gamma, 1.0);
  fill_gaussian(layout_.b1_dw_w, std::sqrt(2.0 / 9.0));
  fill_gaussian(layout_.b1_pw_w, std::sqrt(2.0 / d.in_channels));
  fill_const(layout_.b2_gamma, 1.0);
  fill_gaussian(layout_.b2_dw_w, std::sqrt(2.0 / 9.0));
  fill_gaussian(layout_.b2_pw_w, std::sqrt(2.0 / d.hidden1));
  fill_const(layout_.b3_gamma, 1.0);
  // damped output layer: the initial prompt stays small, so adaptation
  // starts near the unprompted operating point instead of undoing noise
  fill_gaussian(layout_.b3_w, 0.1 * std::sqrt(2.0 / (9.0 * d.hidden2)));
  return p;
}

void PromptGenerator::load_weights(std::span<const double> params,
                                   DecoderWeights& w) const {
  if (params.size() != layout_.total)
    throw ConfigError("generator: parameter vector has " +
                      std::to_string(params.size()) + " entries, expected " +
                      std::to_string(layout_.total));
  w.values.resize(layout_.total);
  for (std::size_t i = 0; i < layout_.total; ++i)
    w.values[i] = float(params[i]);
}

const ImageTensor& PromptGenerator::generate_from_features(
    std::span<const float> features, const DecoderWeights& w,
    Workspace& ws) const {
  const DecoderConfig& d = config_.decoder;
  const float* weights = w.values.data();
  auto seg = [&](Segment s) { return weights + s.offset; };

  // [features || trigger] -> in_channels x in_hw x in_hw
  const int s1 = d.in_hw;                 // 7
  const int s2 = s1 * 2;                  // 14
  const int s3 = s2 * 2;                  // 28
  ws.input.resize(std::size_t(d.in_channels) * s1 * s1);
  std::copy(features.begin(), features.end(), ws.input.begin());
  const float* trig = seg(layout_.trigger);
  std::copy(trig, trig + layout_.trigger.size,
            ws.input.begin() + features.size());

  auto block = [&](std::vector<float>& in, std::vector<float>& out, int c_in,
                   int hw, Segment gamma, Segment beta, Segment dw_w,
                   Segment dw_b) {
    for (int c = 0; c < c_in; ++c)
      channel_norm(in.data() + std::size_t(c) * hw * hw, std::size_t(hw) * hw,
                   seg(gamma)[c], seg(beta)[c]);
    kernels::gelu_f32(in.data(), std::size_t(c_in) * hw * hw);
    out.resize(std::size_t(c_in) * hw * hw);
    for (int c = 0; c < c_in; ++c) {
      pad_plane(in.data() + std::size_t(c) * hw * hw, hw, ws.padded);
      kernels::conv3x3_f32(ws.padded.data(), hw, hw, seg(dw_w) + 9 * c,
                           seg(dw_b)[c], out.data() + std::size_t(c) * hw * hw);
    }
  };
  auto pointwise = [&](const std::vector<float>& in, std::vector<float>& out,
                       int c_in, int c_out, int hw, Segment pw_w,
                       Segment pw_b) {
    const std::size_t plane = std::size_t(hw) * hw;
    out.resize(std::size_t(c_out) * plane);
    for (int oc = 0; oc < c_out; ++oc) {
      float* op = out.data() + oc * plane;
      std::fill(op, op + plane, seg(pw_b)[oc]);
      for (int ic = 0; ic < c_in; ++ic)
        kernels::axpy_f32(seg(pw_w)[std::size_t(oc) * c_in + ic],
                          in.data() + ic * plane, op, plane);
    }
  };

  // block 1 at in_hw, depthwise-separable
  std::vector<float>& a = ws.map_a;
  std::vector<float>& b = ws.map_b;
  a = ws.input;
  block(a, b, d.in_channels, s1, layout_.b1_gamma, layout_.b1_beta,
        layout_.b1_dw_w, layout_.b1_dw_b);
  pointwise(b, a, d.in_channels, d.hidden1, s1, layout_.b1_pw_w,
            layout_.b1_pw_b);

  // upsample, block 2
  b.resize(std::size_t(d.hidden1) * s2 * s2);
  upsample2x(a.data(), d.hidden1, s1, b.data());
  block(b, a, d.hidden1, s2, layout_.b2_gamma, layout_.b2_beta,
        layout_.b2_dw_w, layout_.b2_dw_b);
  pointwise(a, b, d.hidden1, d.hidden2, s2, layout_.b2_pw_w, layout_.b2_pw_b);

  // upsample, block 3 with a standard (dense-channel) 3x3 convolution
  a.resize(std::size_t(d.hidden2) * s3 * s3);
  upsample2x(b.data(), d.hidden2, s2, a.data());
  for (int c = 0; c < d.hidden2; ++c)
    channel_norm(a.data() + std::size_t(c) * s3 * s3, std::size_t(s3) * s3,
                 seg(layout_.b3_gamma)[c], seg(layout_.b3_beta)[c]);
  kernels::gelu_f32(a.data(), std::size_t(d.hidden2) * s3 * s3);

  const std::size_t plane3 = std::size_t(s3) * s3;
  b.assign(std::size_t(d.out_channels) * plane3, 0.0f);
  ws.conv_tmp.resize(plane3);
  for (int oc = 0; oc < d.out_channels; ++oc) {
    float* op = b.data() + oc * plane3;
    std::fill(op, op + plane3, seg(layout_.b3_b)[oc]);
    for (int ic = 0; ic < d.hidden2; ++ic) {
      pad_plane(a.data() + ic * plane3, s3, ws.padded);
      kernels::conv3x3_f32(ws.padded.data(), s3, s3,
                           seg(layout_.b3_w) +
                               (std::size_t(oc) * d.hidden2 + ic) * 9,
                           0.0f, ws.conv_tmp.data());
      kernels::axpy_f32(1.0f, ws.conv_tmp.data(), op, plane3);
    }
  }

  // nearest-neighbor resize to the input resolution
  if (ws.prompt.channels != channels_ || ws.prompt.height != height_ ||
      ws.prompt.width != width_)
    ws.prompt = ImageTensor(channels_, height_, width_);
  for (int c = 0; c < channels_; ++c) {
    const float* sp = b.data() + std::size_t(c) * plane3;
    for (int y = 0; y < height_; ++y) {
      const int sy = y * s3 / height_;
      float* row = ws.prompt.plane(c) + std::size_t(y) * width_;
      for (int x = 0; x < width_; ++x)
        row[x] = sp[std::size_t(sy) * s3 + x * s3 / width_];
    }
  }
  return ws.prompt;
}

ImageTensor PromptGenerator::generate(const ImageTensor& x,
                                      std::span<const double> params) const {
  if (x.channels != channels_ || x.height != height_ || x.width != width_)
    throw ConfigError("generator: input shape mismatch");
  DecoderWeights w;
  load_weights(params, w);
  Workspace ws;
  const std::vector<float> z = encoder_.encode(x);
  return generate_from_features(z, w, ws);
}

ImageTensor apply_prompt(const ImageTensor& x, const ImageTensor& prompt,
                         double epsilon) {
  if (!x.same_shape(prompt))
    throw ConfigError("apply_prompt: shape mismatch");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ConfigError("apply_prompt: epsilon must be in [0, 1]");
  ImageTensor out(x.channels, x.height, x.width);
  kernels::add_scaled_clip01_f32(x.data.data(), prompt.data.data(),
                                 float(epsilon), out.data.data(),
                                 out.data.size());
  return out;
}

}  // namespace zop
