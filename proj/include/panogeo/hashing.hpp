#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace panogeo {

// FNV-1a over raw bytes; used by determinism checks to compare runs.
inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
std::uint64_t fnv1a64_span(const std::vector<T>& v,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  static_assert(std::is_trivially_copyable_v<T>);
  return v.empty() ? h : fnv1a64(v.data(), v.size() * sizeof(T), h);
}

inline std::uint64_t fnv1a64_str(const std::string& s,
                                 std::uint64_t h = 0xcbf29ce484222325ull) {
  return s.empty() ? h : fnv1a64(s.data(), s.size(), h);
}

}  // namespace panogeo
