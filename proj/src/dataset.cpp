#include "panogeo/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "panogeo/json_io.hpp"
#include "panogeo/png_io.hpp"

namespace panogeo {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

std::string portable(const std::filesystem::path& base,
                     const std::filesystem::path& p) {
  const std::filesystem::path rel = p.lexically_proximate(base);
  return rel.generic_string();
}

}  // namespace

std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("load_manifest: cannot open " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<DatasetEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("load_manifest: " + path.string() + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    DatasetEntry entry;
    entry.image = resolve(base, j.at("image").get<std::string>());
    entry.params = resolve(base, j.at("params").get<std::string>());
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_manifest(const std::filesystem::path& path,
                   const std::vector<DatasetEntry>& entries) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("save_manifest: cannot open " + path.string());
  const std::filesystem::path base = path.parent_path();
  for (const DatasetEntry& e : entries) {
    nlohmann::json j;
    j["image"] = portable(base, e.image);
    j["params"] = portable(base, e.params);
    os << j.dump() << "\n";
  }
  if (!os)
    throw std::runtime_error("save_manifest: write failed for " + path.string());
}

Sample ManifestSamples::load(std::size_t index) const {
  const DatasetEntry& e = entries_.at(index);
  Sample s;
  s.image = read_png(e.image);
  s.params = load_params_sidecar(e.params);
  return s;
}

}  // namespace panogeo
