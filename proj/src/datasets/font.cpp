#include "zop/datasets.hpp"
#include "zop/image.hpp"

namespace zop {

namespace {

// 5x7 dot-matrix digits, row-major, '#' = stroke.
const char* const kGlyphs[10][7] = {
    {".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."},  // 0
    {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."},  // 1
    {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"},  // 2
    {"####.", "....#", "....#", ".###.", "....#", "....#", "####."},  // 3
    {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."},  // 4
    {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."},  // 5
    {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."},  // 6
    {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."},  // 7
    {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."},  // 8
    {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."},  // 9
};

}  // namespace

std::vector<float> ProceduralFontSource::draw(int digit_class, int digit_size,
                                              Rng& rng) const {
  if (digit_class < 0 || digit_class > 9)
    throw DataError("font: class " + std::to_string(digit_class) +
                    " outside [0, 10)");
  if (digit_size < 7) throw ConfigError("font: digit size must be >= 7");

  // Center the 5-wide glyph in a 7x7 cell grid, then scale to digit_size.
  const int jitter_x = int(rng.below(3)) - 1;
  const int jitter_y = int(rng.below(3)) - 1;
  const float intensity = float(rng.uniform(0.72, 1.0));

  std::vector<float> out(std::size_t(digit_size) * digit_size, 0.0f);
  for (int y = 0; y < digit_size; ++y) {
    for (int x = 0; x < digit_size; ++x) {
      int ty = y + jitter_y;
      int tx = x + jitter_x;
      if (ty < 0 || tx < 0 || ty >= digit_size || tx >= digit_size) continue;
      const int cy = ty * 7 / digit_size;
      const int cx = tx * 7 / digit_size;
      const int gx = cx - 1;  // glyph columns sit in cells 1..5
      if (gx < 0 || gx > 4) continue;
      if (kGlyphs[digit_class][cy][gx] == '#')
        out[std::size_t(y) * digit_size + x] = intensity;
    }
  }

  // mild per-pixel noise keeps strokes off the exact binary grid
  for (float& v : out) {
    v += float(rng.uniform(-0.03, 0.03));
    v = quantize255(v);
  }
  return out;
}

}  // namespace zop
