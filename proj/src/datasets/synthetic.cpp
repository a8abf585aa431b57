#include <algorithm>
#include <cmath>

#include "zop/datasets.hpp"

namespace zop {

namespace {

std::array<float, 3> hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = v - c;
  return {float(r + m), float(g + m), float(b + m)};
}

// Paste a grayscale glyph into an RGB canvas; the stroke value acts as the
// blend weight so near-zero pixels keep the background.
void paste_blend(ImageTensor& img, const std::vector<float>& glyph, int size,
                 int top, int left) {
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const float s = glyph[std::size_t(y) * size + x];
      for (int c = 0; c < img.channels; ++c) {
        float& px = img.at(c, top + y, left + x);
        px = quantize255(px * (1.0f - s) + s);
      }
    }
}

void fill_background(ImageTensor& img, const std::array<float, 3>& rgb) {
  for (int c = 0; c < img.channels; ++c) {
    const float v = quantize255(rgb[c]);
    float* plane = img.plane(c);
    for (int i = 0; i < img.height * img.width; ++i) plane[i] = v;
  }
}

std::vector<float> upscale_nearest(const std::vector<float>& glyph, int size,
                                   int factor) {
  const int big = size * factor;
  std::vector<float> out(std::size_t(big) * big);
  for (int y = 0; y < big; ++y)
    for (int x = 0; x < big; ++x)
      out[std::size_t(y) * big + x] =
          glyph[std::size_t(y / factor) * size + x / factor];
  return out;
}

bool boxes_overlap(int ax, int ay, int aw, int bx, int by, int bw) {
  return ax < bx + bw && bx < ax + aw && ay < by + bw && by < ay + aw;
}

}  // namespace

std::vector<std::array<float, 3>> bias_palette() {
  std::vector<std::array<float, 3>> palette;
  palette.reserve(10);
  for (int k = 0; k < 10; ++k)
    palette.push_back(hsv_to_rgb(36.0 * k, 1.0, 0.9));
  return palette;
}

SyntheticDataset make_biased_mnist(const DigitSource& source,
                                   const BiasConfig& config,
                                   const std::string& split, int per_class,
                                   int canvas, int digit_size,
                                   std::uint64_t seed) {
  if (config.rho < 0.0 || config.rho > 1.0)
    throw ConfigError("biased: rho must be in [0, 1]");
  if (canvas < digit_size) throw ConfigError("biased: canvas too small");

  SyntheticDataset ds;
  ds.kind = "biased";
  ds.split = split;
  ds.canvas = canvas;
  ds.digit_size = digit_size;
  ds.rho = config.rho;
  ds.seed = seed;
  ds.source = source.name();

  const std::vector<std::array<float, 3>> palette = bias_palette();
  // correlation is reversed on the test split
  const double p_preassigned =
      split == "test" ? 1.0 - config.rho : config.rho;
  const int n = per_class * config.num_classes;
  const int margin = (canvas - digit_size) / 2;
  const Rng master{Rng::mix(seed) ^ Rng::hash_name("biased-" + split)};

  for (int i = 0; i < n; ++i) {
    Rng rng = master.substream("image", std::uint64_t(i));
    const int label = i % config.num_classes;

    ImageMeta meta;
    std::array<float, 3> bg;
    if (rng.uniform01() < p_preassigned) {
      meta.bias_color = label;
      bg = palette[label];
    } else if (config.random_other_colors) {
      meta.bias_color = -2;
      bg = {float(rng.uniform01()), float(rng.uniform01()),
            float(rng.uniform01())};
    } else {
      int other = int(rng.below(9));
      if (other >= label) ++other;
      meta.bias_color = other;
      bg = palette[other];
    }

    ImageTensor img(3, canvas, canvas);
    fill_background(img, bg);
    paste_blend(img, source.draw(label, digit_size, rng), digit_size, margin,
                margin);

    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
    ds.meta.push_back(meta);
  }
  return ds;
}

SyntheticDataset make_loc_mnist(const DigitSource& source, int ratio,
                                const std::string& split, int per_class,
                                int canvas, int digit_size,
                                std::uint64_t seed) {
  if (ratio != 1 && ratio != 4)
    throw ConfigError("loc: scale ratio must be 1 or 4");
  if (canvas < digit_size * (ratio + 2))
    throw ConfigError("loc: canvas " + std::to_string(canvas) +
                      " too small for digit " + std::to_string(digit_size) +
                      " at ratio 1:" + std::to_string(ratio) +
                      " (need >= " + std::to_string(digit_size * (ratio + 2)) +
                      ")");

  SyntheticDataset ds;
  ds.kind = "loc";
  ds.split = split;
  ds.canvas = canvas;
  ds.digit_size = digit_size;
  ds.ratio = ratio;
  ds.seed = seed;
  ds.source = source.name();

  const int n = per_class * ds.num_classes;
  const int fake_size = digit_size * ratio;
  const int fake_corner = (canvas - fake_size) / 2;
  const Rng master{Rng::mix(seed) ^ Rng::hash_name("loc-" + split)};

  for (int i = 0; i < n; ++i) {
    Rng rng = master.substream("image", std::uint64_t(i));
    const int label = i % ds.num_classes;

    // real digit flush against one of the four edges, sliding along it
    int tx = 0, ty = 0;
    for (;;) {
      const int side = int(rng.below(4));
      const int along = int(rng.below(std::uint64_t(canvas - digit_size + 1)));
      switch (side) {
        case 0: tx = along; ty = 0; break;                       // top
        case 1: tx = along; ty = canvas - digit_size; break;     // bottom
        case 2: tx = 0; ty = along; break;                       // left
        default: tx = canvas - digit_size; ty = along; break;    // right
      }
      if (!boxes_overlap(tx, ty, digit_size, fake_corner, fake_corner,
                         fake_size))
        break;
      ++ds.resample_count;
    }

    const int fake_class = int(rng.below(10));
    std::vector<float> fake = source.draw(fake_class, digit_size, rng);
    if (ratio > 1) fake = upscale_nearest(fake, digit_size, ratio);

    ImageTensor img(3, canvas, canvas);
    paste_blend(img, fake, fake_size, fake_corner, fake_corner);
    paste_blend(img, source.draw(label, digit_size, rng), digit_size, ty, tx);

    ImageMeta meta;
    meta.target_x = tx;
    meta.target_y = ty;
    meta.fake_class = fake_class;
    meta.scale_ratio = ratio;

    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
    ds.meta.push_back(meta);
  }
  return ds;
}

SyntheticDataset make_clean_digits(const DigitSource& source,
                                   const std::string& split, int per_class,
                                   int canvas, int digit_size,
                                   std::uint64_t seed) {
  if (canvas < digit_size) throw ConfigError("clean: canvas too small");

  SyntheticDataset ds;
  ds.kind = "clean";
  ds.split = split;
  ds.canvas = canvas;
  ds.digit_size = digit_size;
  ds.seed = seed;
  ds.source = source.name();

  const int n = per_class * ds.num_classes;
  const int margin = (canvas - digit_size) / 2;
  const Rng master{Rng::mix(seed) ^ Rng::hash_name("clean-" + split)};

  for (int i = 0; i < n; ++i) {
    Rng rng = master.substream("image", std::uint64_t(i));
    const int label = i % ds.num_classes;
    ImageTensor img(3, canvas, canvas);
    paste_blend(img, source.draw(label, digit_size, rng), digit_size, margin,
                margin);
    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
    ds.meta.emplace_back();
  }
  return ds;
}

SyntheticDataset make_few_shot_split(const SyntheticDataset& dataset, int k,
                                     std::uint64_t seed) {
  if (k < 1) throw ConfigError("few-shot: k must be >= 1");

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.size(); ++i)
    by_class[dataset.labels[i]].push_back(i);

  Rng rng{Rng::mix(seed) ^ Rng::hash_name("few-shot")};
  std::vector<std::size_t> selected;
  for (int c = 0; c < dataset.num_classes; ++c) {
    std::vector<std::size_t>& pool = by_class[c];
    if (int(pool.size()) < k)
      throw DataError("few-shot: class " + std::to_string(c) + " has only " +
                      std::to_string(pool.size()) + " examples, need " +
                      std::to_string(k));
    // partial Fisher-Yates, k draws
    for (int j = 0; j < k; ++j) {
      const std::size_t pick = j + rng.below(pool.size() - j);
      std::swap(pool[j], pool[pick]);
      selected.push_back(pool[j]);
    }
  }
  std::sort(selected.begin(), selected.end());

  SyntheticDataset out = dataset;
  out.images.clear();
  out.labels.clear();
  out.meta.clear();
  for (std::size_t idx : selected) {
    out.images.push_back(dataset.images[idx]);
    out.labels.push_back(dataset.labels[idx]);
    out.meta.push_back(dataset.meta[idx]);
  }
  return out;
}

}  // namespace zop
