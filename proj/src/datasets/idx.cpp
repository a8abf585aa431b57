#include <cstdio>
#include <memory>

#include "zop/datasets.hpp"
#include "zop/errors.hpp"

// IDX format: 4-byte big-endian magic, then big-endian dimension sizes, then
// raw bytes. Magic 0x00000803 = uint8 rank-3 (images), 0x00000801 = uint8
// rank-1 (labels).

namespace zop {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_or_throw(const std::string& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw ParseError("cannot open '" + path + "'");
  return f;
}

std::uint32_t read_be32(std::FILE* f, const std::string& path,
                        long* offset) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4)
    throw ParseError(path + ": truncated header at byte offset " +
                     std::to_string(*offset));
  *offset += 4;
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::FILE* f, std::uint32_t v) {
  unsigned char b[4] = {(unsigned char)(v >> 24), (unsigned char)(v >> 16),
                        (unsigned char)(v >> 8), (unsigned char)v};
  std::fwrite(b, 1, 4, f);
}

}  // namespace

RawDigits load_idx(const std::string& image_path,
                   const std::string& label_path) {
  RawDigits out;

  {
    File f = open_or_throw(image_path, "rb");
    long offset = 0;
    const std::uint32_t magic = read_be32(f.get(), image_path, &offset);
    if (magic != 0x00000803)
      throw ParseError(image_path + ": bad image magic " +
                       std::to_string(magic) + " (expected 2051)");
    const std::uint32_t count = read_be32(f.get(), image_path, &offset);
    out.rows = int(read_be32(f.get(), image_path, &offset));
    out.cols = int(read_be32(f.get(), image_path, &offset));
    if (out.rows < 1 || out.cols < 1 || out.rows > 4096 || out.cols > 4096)
      throw ParseError(image_path + ": implausible image shape");

    const std::size_t pixels = std::size_t(out.rows) * out.cols;
    std::vector<unsigned char> buf(pixels);
    out.images.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::size_t got = std::fread(buf.data(), 1, pixels, f.get());
      if (got != pixels)
        throw ParseError(image_path + ": truncated image data, expected " +
                         std::to_string(pixels) + " bytes at offset " +
                         std::to_string(offset) + ", got " +
                         std::to_string(got));
      offset += long(got);
      std::vector<float> img(pixels);
      for (std::size_t p = 0; p < pixels; ++p)
        img[p] = float(buf[p]) / 255.0f;
      out.images.push_back(std::move(img));
    }
  }

  {
    File f = open_or_throw(label_path, "rb");
    long offset = 0;
    const std::uint32_t magic = read_be32(f.get(), label_path, &offset);
    if (magic != 0x00000801)
      throw ParseError(label_path + ": bad label magic " +
                       std::to_string(magic) + " (expected 2049)");
    const std::uint32_t count = read_be32(f.get(), label_path, &offset);
    std::vector<unsigned char> buf(count);
    if (std::fread(buf.data(), 1, count, f.get()) != count)
      throw ParseError(label_path + ": truncated label data, expected " +
                       std::to_string(count) + " bytes at offset " +
                       std::to_string(offset));
    out.labels.assign(buf.begin(), buf.end());
  }

  if (out.images.size() != out.labels.size())
    throw DataError("idx: image count " + std::to_string(out.images.size()) +
                    " != label count " + std::to_string(out.labels.size()));
  return out;
}

void write_idx(const RawDigits& digits, const std::string& image_path,
               const std::string& label_path) {
  {
    File f = open_or_throw(image_path, "wb");
    write_be32(f.get(), 0x00000803);
    write_be32(f.get(), std::uint32_t(digits.images.size()));
    write_be32(f.get(), std::uint32_t(digits.rows));
    write_be32(f.get(), std::uint32_t(digits.cols));
    std::vector<unsigned char> buf(std::size_t(digits.rows) * digits.cols);
    for (const std::vector<float>& img : digits.images) {
      for (std::size_t p = 0; p < buf.size(); ++p)
        buf[p] = (unsigned char)(img[p] * 255.0f + 0.5f);
      std::fwrite(buf.data(), 1, buf.size(), f.get());
    }
  }
  {
    File f = open_or_throw(label_path, "wb");
    write_be32(f.get(), 0x00000801);
    write_be32(f.get(), std::uint32_t(digits.labels.size()));
    for (int label : digits.labels) {
      const unsigned char b = (unsigned char)label;
      std::fwrite(&b, 1, 1, f.get());
    }
  }
}

IdxDigitSource::IdxDigitSource(RawDigits digits) : digits_(std::move(digits)) {
  by_class_.resize(10);
  for (std::size_t i = 0; i < digits_.labels.size(); ++i) {
    const int label = digits_.labels[i];
    if (label < 0 || label > 9)
      throw DataError("idx: label " + std::to_string(label) +
                      " outside [0, 10)");
    by_class_[label].push_back(i);
  }
  for (int c = 0; c < 10; ++c)
    if (by_class_[c].empty())
      throw DataError("idx: no examples for class " + std::to_string(c));
}

std::vector<float> IdxDigitSource::draw(int digit_class, int digit_size,
                                        Rng& rng) const {
  const std::vector<std::size_t>& pool = by_class_[digit_class];
  const std::vector<float>& src = digits_.images[pool[rng.below(pool.size())]];
  std::vector<float> out(std::size_t(digit_size) * digit_size);
  // nearest-neighbor resample to the requested glyph size
  for (int y = 0; y < digit_size; ++y) {
    const int sy = int(std::size_t(y) * digits_.rows / digit_size);
    for (int x = 0; x < digit_size; ++x) {
      const int sx = int(std::size_t(x) * digits_.cols / digit_size);
      out[std::size_t(y) * digit_size + x] = src[std::size_t(sy) * digits_.cols + sx];
    }
  }
  return out;
}

}  // namespace zop
