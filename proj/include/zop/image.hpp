#pragma once

#include <cstddef>
#include <vector>

#include "zop/errors.hpp"

namespace zop {

// Dense CHW image, values in [0, 1].
struct ImageTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  ImageTensor() = default;
  ImageTensor(int c, int h, int w)
      : channels(c), height(h), width(w), data(std::size_t(c) * h * w, 0.0f) {
    if (c < 1 || h < 1 || w < 1) throw ConfigError("bad image shape");
  }

  float& at(int c, int y, int x) {
    return data[(std::size_t(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(std::size_t(c) * height + y) * width + x];
  }
  float* plane(int c) { return data.data() + std::size_t(c) * height * width; }
  const float* plane(int c) const {
    return data.data() + std::size_t(c) * height * width;
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const ImageTensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

// Quantize to the k/255 grid so float pixels survive a uint8 round trip.
inline float quantize255(float v) {
  if (v < 0.0f) v = 0.0f;
  if (v > 1.0f) v = 1.0f;
  return float(int(v * 255.0f + 0.5f)) / 255.0f;
}

}  // namespace zop
