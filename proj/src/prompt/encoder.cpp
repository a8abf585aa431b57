#include <cmath>
#include <numbers>

#include "zop/errors.hpp"
#include "zop/kernels.hpp"
#include "zop/prompt.hpp"

namespace zop {

namespace {

// Orthonormalize `rows` Gaussian rows of length `cols` (modified
// Gram-Schmidt). rows <= cols required.
std::vector<float> orthonormal_rows(int rows, int cols, Rng rng) {
  std::vector<double> m(std::size_t(rows) * cols);
  for (double& v : m) v = rng.gaussian();
  for (int r = 0; r < rows; ++r) {
    double* row = m.data() + std::size_t(r) * cols;
    for (int p = 0; p < r; ++p) {
      const double* prev = m.data() + std::size_t(p) * cols;
      const double proj = kernels::dot_f64(row, prev, cols);
      kernels::axpy_f64(-proj, prev, row, cols);
    }
    const double norm = std::sqrt(kernels::dot_f64(row, row, cols));
    if (norm < 1e-9) throw ConfigError("projection rows degenerate");
    kernels::scale_f64(1.0 / norm, row, cols);
  }
  std::vector<float> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = float(m[i]);
  return out;
}

}  // namespace

FrozenEncoder::FrozenEncoder(const EncoderConfig& config, int channels,
                             int height, int width)
    : config_(config), channels_(channels), height_(height), width_(width) {
  if (config.feature_dim < 1)
    throw ConfigError("encoder: feature_dim must be >= 1");

  if (config.kind == "pixel") {
    pre_dim_ = channels * height * width;
  } else if (config.kind == "spectral") {
    freq_ = std::min(16, std::min(height, width));
    pre_dim_ = freq_ * freq_ + channels;
    cos_y_.resize(std::size_t(freq_) * height);
    sin_y_.resize(std::size_t(freq_) * height);
    cos_x_.resize(std::size_t(freq_) * width);
    sin_x_.resize(std::size_t(freq_) * width);
    for (int u = 0; u < freq_; ++u) {
      for (int y = 0; y < height; ++y) {
        const double ang = 2.0 * std::numbers::pi * u * y / height;
        cos_y_[std::size_t(u) * height + y] = float(std::cos(ang));
        sin_y_[std::size_t(u) * height + y] = float(std::sin(ang));
      }
      for (int x = 0; x < width; ++x) {
        const double ang = 2.0 * std::numbers::pi * u * x / width;
        cos_x_[std::size_t(u) * width + x] = float(std::cos(ang));
        sin_x_[std::size_t(u) * width + x] = float(std::sin(ang));
      }
    }
  } else {
    throw ConfigError("encoder: unknown kind '" + config.kind +
                      "' (expected pixel or spectral)");
  }

  if (config.feature_dim > pre_dim_)
    throw ConfigError("encoder: feature_dim exceeds raw feature size " +
                      std::to_string(pre_dim_));
  projection_ = orthonormal_rows(config.feature_dim, pre_dim_,
                                 Rng(Rng::mix(config.projection_seed) ^
                                     Rng::hash_name("encoder-projection")));
}

std::vector<float> FrozenEncoder::features(const ImageTensor& x) const {
  if (config_.kind == "pixel")
    return std::vector<float>(x.data.begin(), x.data.end());

  std::vector<float> pre(pre_dim_, 0.0f);

  // luma plane
  std::vector<float> luma(std::size_t(height_) * width_, 0.0f);
  for (int c = 0; c < channels_; ++c)
    kernels::axpy_f32(1.0f / float(channels_), x.plane(c), luma.data(),
                      luma.size());

  // low-frequency DFT magnitudes: row transform then column transform.
  // Shifting the digit inside the canvas only rotates phases, so the
  // magnitudes are translation-invariant features.
  std::vector<float> row_re(std::size_t(freq_) * width_, 0.0f);
  std::vector<float> row_im(std::size_t(freq_) * width_, 0.0f);
  for (int u = 0; u < freq_; ++u)
    for (int y = 0; y < height_; ++y) {
      const float* src = luma.data() + std::size_t(y) * width_;
      kernels::axpy_f32(cos_y_[std::size_t(u) * height_ + y], src,
                        row_re.data() + std::size_t(u) * width_, width_);
      kernels::axpy_f32(-sin_y_[std::size_t(u) * height_ + y], src,
                        row_im.data() + std::size_t(u) * width_, width_);
    }
  for (int u = 0; u < freq_; ++u) {
    const float* re = row_re.data() + std::size_t(u) * width_;
    const float* im = row_im.data() + std::size_t(u) * width_;
    for (int v = 0; v < freq_; ++v) {
      const float* cx = cos_x_.data() + std::size_t(v) * width_;
      const float* sx = sin_x_.data() + std::size_t(v) * width_;
      const float fr = kernels::dot_f32(re, cx, width_) +
                       kernels::dot_f32(im, sx, width_);
      const float fi = kernels::dot_f32(im, cx, width_) -
                       kernels::dot_f32(re, sx, width_);
      pre[std::size_t(u) * freq_ + v] =
          std::sqrt(fr * fr + fi * fi) / float(height_ * width_);
    }
  }

  // balance the spectral block against the color block before projection
  float* mags = pre.data();
  const std::size_t nmag = std::size_t(freq_) * freq_;
  const float mag_norm = std::sqrt(kernels::dot_f32(mags, mags, nmag));
  if (mag_norm > 1e-12f)
    kernels::affine_f32(mags, 1.0f / mag_norm, 0.0f, mags, nmag);

  // per-channel means: the background-color signal, also shift-invariant
  float* means = pre.data() + nmag;
  const std::size_t plane = std::size_t(height_) * width_;
  for (int c = 0; c < channels_; ++c)
    means[c] = 0.5f * kernels::sum_f32(x.plane(c), plane) / float(plane);
  return pre;
}

std::vector<float> FrozenEncoder::encode(const ImageTensor& x) const {
  if (x.channels != channels_ || x.height != height_ || x.width != width_)
    throw ConfigError("encoder: input shape mismatch");
  const std::vector<float> pre = features(x);
  std::vector<float> z(config_.feature_dim);
  kernels::matvec_f32(projection_.data(), config_.feature_dim, pre_dim_,
                      pre.data(), nullptr, z.data());
  const float norm =
      std::sqrt(kernels::dot_f32(z.data(), z.data(), z.size()));
  const float target = std::sqrt(float(config_.feature_dim));
  const float scale = norm > 1e-12f ? target / norm : 0.0f;
  for (float& v : z) v *= scale;
  return z;
}

}  // namespace zop
