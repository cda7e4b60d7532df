#include "varwidth/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace varwidth {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

void ArtifactWriter::write(const std::string& path,
                           const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
  entries_.push_back({path, content.size(), fnv1a64_hex(content)});
}

void ArtifactWriter::write_manifest(
    const std::string& path, const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& config_items)
    const {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config_items) cfg[key] = value;
  j["config"] = cfg;
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for (const Entry& e : entries_) {
    outs.push_back({{"path", e.path},
                    {"bytes", e.bytes},
                    {"fnv1a64", e.fnv1a64}});
  }
  j["outputs"] = outs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace varwidth
