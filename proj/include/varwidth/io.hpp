#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace varwidth {

// Doubles rendered with 17 significant digits so CSV round-trips losslessly.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

// Writes content and remembers (path, size, checksum) for the run manifest.
class ArtifactWriter {
 public:
  void write(const std::string& path, const std::string& content);

  struct Entry {
    std::string path;
    std::size_t bytes;
    std::string fnv1a64;
  };
  const std::vector<Entry>& entries() const { return entries_; }

  // Manifest JSON: {"command", "config": {...}, "outputs": [...]}.
  void write_manifest(const std::string& path, const std::string& command,
                      const std::vector<std::pair<std::string, std::string>>&
                          config_items) const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace varwidth
