#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace zop {

using Json = nlohmann::ordered_json;

// FNV-1a over the canonical (insertion-ordered, compact) JSON dump; embedded
// in every output artifact as provenance.
std::string config_hash(const Json& config);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

// Shortest round-trip decimal for doubles, stable across runs.
std::string format_double(double v);

}  // namespace zop
