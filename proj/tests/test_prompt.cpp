#include <doctest.h>

#include <cmath>

#include "zop/datasets.hpp"
#include "zop/prompt.hpp"

using namespace zop;

namespace {

GeneratorConfig small_config() {
  GeneratorConfig cfg;
  cfg.encoder.feature_dim = 100;
  cfg.trigger_dim = 96;  // 196 = 4 * 7 * 7
  cfg.decoder.hidden1 = 16;
  cfg.decoder.hidden2 = 8;
  return cfg;
}

ImageTensor sample_image(int canvas, std::uint64_t seed) {
  ProceduralFontSource font;
  const SyntheticDataset ds =
      make_loc_mnist(font, 1, "train", 1, canvas, 10, seed);
  return ds.images[0];
}

}  // namespace

TEST_CASE("prompt has the input shape and is deterministic") {
  const GeneratorConfig cfg = small_config();
  const PromptGenerator gen(cfg, 3, 32, 32);
  const ParameterVector params = gen.init_params(Rng(5));
  const ImageTensor x = sample_image(32, 1);

  const ImageTensor p1 = gen.generate(x, params);
  CHECK(p1.channels == 3);
  CHECK(p1.height == 32);
  CHECK(p1.width == 32);
  const ImageTensor p2 = gen.generate(x, params);
  CHECK(p1.data == p2.data);
}

TEST_CASE("prompts depend on the input") {
  const GeneratorConfig cfg = small_config();
  const PromptGenerator gen(cfg, 3, 32, 32);
  const ParameterVector params = gen.init_params(Rng(5));
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const ImageTensor a = sample_image(32, s);
    const ImageTensor b = sample_image(32, s + 100);
    REQUIRE(gen.encode(a) != gen.encode(b));
    CHECK(gen.generate(a, params).data != gen.generate(b, params).data);
  }
}

TEST_CASE("apply_prompt arithmetic and clipping") {
  ImageTensor x(1, 2, 2);
  ImageTensor p(1, 2, 2);

  // epsilon 0 returns x exactly
  for (int i = 0; i < 4; ++i) {
    x.data[i] = 0.25f * float(i);
    p.data[i] = -3.0f + float(i);
  }
  CHECK(apply_prompt(x, p, 0.0).data == x.data);

  // ceiling clip
  std::fill(x.data.begin(), x.data.end(), 1.0f);
  std::fill(p.data.begin(), p.data.end(), 2.5f);
  for (float v : apply_prompt(x, p, 0.7).data) CHECK(v == 1.0f);

  // 0.5 + 0.3 * 1.0 = 0.8
  std::fill(x.data.begin(), x.data.end(), 0.5f);
  std::fill(p.data.begin(), p.data.end(), 1.0f);
  for (float v : apply_prompt(x, p, 0.3).data)
    CHECK(v == doctest::Approx(0.8).epsilon(1e-6));

  CHECK_THROWS_AS(apply_prompt(x, p, 1.5), ConfigError);
  ImageTensor bad(1, 3, 2);
  CHECK_THROWS_AS(apply_prompt(x, bad, 0.5), ConfigError);
}

TEST_CASE("parameter layout partitions the flat vector exactly") {
  const GeneratorConfig cfg = small_config();
  const PromptGenerator gen(cfg, 3, 32, 32);
  const ParamLayout& layout = gen.layout();

  std::size_t expect = 0;
  for (const auto& [name, seg] : layout.named()) {
    CHECK(seg.offset == expect);
    expect += seg.size;
  }
  CHECK(expect == layout.total);
  CHECK(layout.total == gen.param_count());
  CHECK(gen.param_count() < kParamBudget);

  // pack(unpack(v)) == v: segment-wise copy out and back is the identity
  Rng rng(8);
  ParameterVector v(layout.total);
  for (double& x : v) x = rng.uniform(-2, 2);
  ParameterVector repacked(layout.total, 0.0);
  for (const auto& [name, seg] : layout.named()) {
    const ParameterVector segment(v.begin() + seg.offset,
                                  v.begin() + seg.offset + seg.size);
    for (std::size_t i = 0; i < seg.size; ++i)
      repacked[seg.offset + i] = segment[i];
  }
  CHECK(repacked == v);
}

TEST_CASE("generator rejects bad configurations") {
  GeneratorConfig cfg = small_config();
  cfg.trigger_dim = 95;  // 195 != 4*7*7
  CHECK_THROWS_AS(PromptGenerator(cfg, 3, 32, 32), ConfigError);

  cfg = small_config();
  cfg.decoder.hidden1 = 2000;  // blows the parameter budget
  CHECK_THROWS_AS(PromptGenerator(cfg, 3, 32, 32), ConfigError);

  cfg = small_config();
  cfg.encoder.kind = "mystery";
  CHECK_THROWS_AS(PromptGenerator(cfg, 3, 32, 32), ConfigError);
}

TEST_CASE("spectral features are invariant to digit translation") {
  // one bright block at two different offsets: same magnitudes, phases only
  EncoderConfig cfg;
  cfg.kind = "spectral";
  cfg.feature_dim = 64;
  const FrozenEncoder enc(cfg, 3, 32, 32);

  ImageTensor a(3, 32, 32), b(3, 32, 32);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        a.at(c, 2 + y, 3 + x) = 1.0f;
        b.at(c, 20 + y, 11 + x) = 1.0f;
      }
  const std::vector<float> za = enc.encode(a);
  const std::vector<float> zb = enc.encode(b);
  // shift without wrap == cyclic shift, so only rounding error remains
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < za.size(); ++i) {
    num += (za[i] - zb[i]) * (za[i] - zb[i]);
    den += za[i] * za[i];
  }
  CHECK(std::sqrt(num / den) < 0.01);

  // pixel-projection features, in contrast, separate the two completely
  EncoderConfig pix;
  pix.kind = "pixel";
  pix.feature_dim = 64;
  const FrozenEncoder enc_pix(pix, 3, 32, 32);
  const std::vector<float> pa = enc_pix.encode(a);
  const std::vector<float> pb = enc_pix.encode(b);
  double pnum = 0.0, pden = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    pnum += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    pden += pa[i] * pa[i];
  }
  CHECK(std::sqrt(pnum / pden) > 0.5);
}

TEST_CASE("encoder output is a frozen function of the projection seed") {
  EncoderConfig cfg;
  cfg.feature_dim = 32;
  const FrozenEncoder e1(cfg, 3, 32, 32);
  const FrozenEncoder e2(cfg, 3, 32, 32);
  const ImageTensor x = sample_image(32, 3);
  CHECK(e1.encode(x) == e2.encode(x));

  cfg.projection_seed = 99;
  const FrozenEncoder e3(cfg, 3, 32, 32);
  CHECK(e1.encode(x) != e3.encode(x));
}
