#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "zop/image.hpp"
#include "zop/rng.hpp"

namespace zop {

// ---- IDX ingestion ----

struct RawDigits {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<float>> images;  // rows*cols grayscale, /255 grid
  std::vector<int> labels;
};

RawDigits load_idx(const std::string& image_path,
                   const std::string& label_path);
void write_idx(const RawDigits& digits, const std::string& image_path,
               const std::string& label_path);

// ---- digit glyph sources ----

// Supplies digit_size x digit_size grayscale glyphs per class.
class DigitSource {
 public:
  virtual ~DigitSource() = default;
  virtual std::vector<float> draw(int digit_class, int digit_size,
                                  Rng& rng) const = 0;
  virtual std::string name() const = 0;
};

// Offline fallback: a 5x7 dot-matrix digit font rendered with per-sample
// jitter, stroke intensity and pixel noise.
class ProceduralFontSource final : public DigitSource {
 public:
  std::vector<float> draw(int digit_class, int digit_size,
                          Rng& rng) const override;
  std::string name() const override { return "procedural"; }
};

class IdxDigitSource final : public DigitSource {
 public:
  explicit IdxDigitSource(RawDigits digits);
  std::vector<float> draw(int digit_class, int digit_size,
                          Rng& rng) const override;
  std::string name() const override { return "idx"; }

 private:
  RawDigits digits_;
  std::vector<std::vector<std::size_t>> by_class_;
};

// ---- synthetic datasets ----

struct ImageMeta {
  int bias_color = -1;  // palette index; -2 when a fully random color was used
  int target_x = -1;    // top-left corner of the edge-placed real digit
  int target_y = -1;
  int fake_class = -1;
  int scale_ratio = 0;
};

struct SyntheticDataset {
  std::string kind;   // "biased" | "loc" | "clean"
  std::string split;  // "train" | "val" | "test"
  int canvas = 64;
  int digit_size = 16;
  int channels = 3;
  int num_classes = 10;
  double rho = 0.0;
  int ratio = 1;
  std::uint64_t seed = 0;
  std::string source;  // digit source name
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  std::vector<ImageMeta> meta;
  std::uint64_t resample_count = 0;

  std::size_t size() const { return images.size(); }
};

struct BiasConfig {
  double rho = 0.9;
  bool random_other_colors = false;  // draw non-preassigned backgrounds
                                     // outside the palette
  int num_classes = 10;
};

// One preassigned background color per class: 10 evenly spaced hues.
std::vector<std::array<float, 3>> bias_palette();

// Background color correlated with the label at strength rho on the train
// split and 1-rho on the test split. Strokes stay grayscale; near-zero
// pixels take the background color.
SyntheticDataset make_biased_mnist(const DigitSource& source,
                                   const BiasConfig& config,
                                   const std::string& split, int per_class,
                                   int canvas, int digit_size,
                                   std::uint64_t seed);

// Real digit flush against a uniformly chosen edge, fake digit (uniform
// class) centered at `ratio` times the real digit's linear size.
SyntheticDataset make_loc_mnist(const DigitSource& source, int ratio,
                                const std::string& split, int per_class,
                                int canvas, int digit_size,
                                std::uint64_t seed);

// Centered digits on a black canvas; surrogate training distribution.
SyntheticDataset make_clean_digits(const DigitSource& source,
                                   const std::string& split, int per_class,
                                   int canvas, int digit_size,
                                   std::uint64_t seed);

// Exactly k train examples per class, sampled without replacement.
SyntheticDataset make_few_shot_split(const SyntheticDataset& dataset, int k,
                                     std::uint64_t seed);

// ---- persistence: uint8 blob + JSON manifest per split directory ----

void save_dataset(const SyntheticDataset& dataset, const std::string& dir);
SyntheticDataset load_dataset(const std::string& dir);

}  // namespace zop
