#include <filesystem>
#include <fstream>

#include "zop/datasets.hpp"
#include "zop/io.hpp"

namespace zop {

namespace {
constexpr int kManifestVersion = 1;
}

void save_dataset(const SyntheticDataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);

  Json manifest;
  manifest["version"] = kManifestVersion;
  manifest["kind"] = ds.kind;
  manifest["split"] = ds.split;
  manifest["canvas"] = ds.canvas;
  manifest["digit_size"] = ds.digit_size;
  manifest["channels"] = ds.channels;
  manifest["num_classes"] = ds.num_classes;
  manifest["rho"] = ds.rho;
  manifest["ratio"] = ds.ratio;
  manifest["seed"] = ds.seed;
  manifest["source"] = ds.source;
  manifest["count"] = ds.size();
  manifest["resample_count"] = ds.resample_count;
  manifest["labels"] = ds.labels;

  Json meta = Json::array();
  for (const ImageMeta& m : ds.meta) {
    Json j;
    if (ds.kind == "biased") {
      j["bias_color"] = m.bias_color;
    } else if (ds.kind == "loc") {
      j["target_x"] = m.target_x;
      j["target_y"] = m.target_y;
      j["fake_class"] = m.fake_class;
      j["scale_ratio"] = m.scale_ratio;
    }
    meta.push_back(std::move(j));
  }
  manifest["meta"] = std::move(meta);

  Json gen_config;
  gen_config["kind"] = ds.kind;
  gen_config["canvas"] = ds.canvas;
  gen_config["digit_size"] = ds.digit_size;
  gen_config["rho"] = ds.rho;
  gen_config["ratio"] = ds.ratio;
  gen_config["seed"] = ds.seed;
  gen_config["source"] = ds.source;
  manifest["config_hash"] = config_hash(gen_config);

  write_json_file(dir + "/manifest.json", manifest);

  const std::size_t per_image =
      std::size_t(ds.channels) * ds.canvas * ds.canvas;
  std::vector<unsigned char> blob;
  blob.reserve(ds.size() * per_image);
  for (const ImageTensor& img : ds.images)
    for (float v : img.data)
      blob.push_back((unsigned char)(v * 255.0f + 0.5f));

  std::ofstream out(dir + "/images.u8", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + dir + "/images.u8'");
  out.write(reinterpret_cast<const char*>(blob.data()),
            std::streamsize(blob.size()));
}

SyntheticDataset load_dataset(const std::string& dir) {
  const Json manifest = read_json_file(dir + "/manifest.json");
  if (manifest.at("version").get<int>() != kManifestVersion)
    throw DataError(dir + ": unsupported manifest version");

  SyntheticDataset ds;
  ds.kind = manifest.at("kind").get<std::string>();
  ds.split = manifest.at("split").get<std::string>();
  ds.canvas = manifest.at("canvas").get<int>();
  ds.digit_size = manifest.at("digit_size").get<int>();
  ds.channels = manifest.at("channels").get<int>();
  ds.num_classes = manifest.at("num_classes").get<int>();
  ds.rho = manifest.at("rho").get<double>();
  ds.ratio = manifest.at("ratio").get<int>();
  ds.seed = manifest.at("seed").get<std::uint64_t>();
  ds.source = manifest.at("source").get<std::string>();
  ds.resample_count = manifest.at("resample_count").get<std::uint64_t>();
  ds.labels = manifest.at("labels").get<std::vector<int>>();

  for (const Json& j : manifest.at("meta")) {
    ImageMeta m;
    if (ds.kind == "biased") {
      m.bias_color = j.at("bias_color").get<int>();
    } else if (ds.kind == "loc") {
      m.target_x = j.at("target_x").get<int>();
      m.target_y = j.at("target_y").get<int>();
      m.fake_class = j.at("fake_class").get<int>();
      m.scale_ratio = j.at("scale_ratio").get<int>();
    }
    ds.meta.push_back(m);
  }

  const std::size_t count = manifest.at("count").get<std::size_t>();
  const std::size_t per_image =
      std::size_t(ds.channels) * ds.canvas * ds.canvas;

  std::ifstream in(dir + "/images.u8", std::ios::binary);
  if (!in) throw DataError("cannot read '" + dir + "/images.u8'");
  std::vector<unsigned char> blob(count * per_image);
  in.read(reinterpret_cast<char*>(blob.data()), std::streamsize(blob.size()));
  if (std::size_t(in.gcount()) != blob.size())
    throw ParseError(dir + "/images.u8: expected " +
                     std::to_string(blob.size()) + " bytes, got " +
                     std::to_string(in.gcount()));

  ds.images.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ImageTensor img(ds.channels, ds.canvas, ds.canvas);
    const unsigned char* src = blob.data() + i * per_image;
    for (std::size_t p = 0; p < per_image; ++p)
      img.data[p] = float(src[p]) / 255.0f;
    ds.images.push_back(std::move(img));
  }

  if (ds.labels.size() != count || ds.meta.size() != count)
    throw DataError(dir + ": manifest count mismatch");
  return ds;
}

}  // namespace zop
