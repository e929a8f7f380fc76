#pragma once

#include <filesystem>
#include <vector>

#include "panogeo/estimator.hpp"

namespace panogeo {

struct DatasetEntry {
  std::filesystem::path image;
  std::filesystem::path params;
};

// Manifest: JSON lines, one {"image": ..., "params": ...} record per line.
// Paths are stored relative to the manifest when possible and resolve
// against the manifest directory on load.
std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path,
                   const std::vector<DatasetEntry>& entries);

// SampleSource over manifest entries; images and sidecars are read lazily.
class ManifestSamples final : public SampleSource {
 public:
  explicit ManifestSamples(std::vector<DatasetEntry> entries)
      : entries_(std::move(entries)) {}

  std::size_t size() const override { return entries_.size(); }
  Sample load(std::size_t index) const override;

 private:
  std::vector<DatasetEntry> entries_;
};

}  // namespace panogeo
