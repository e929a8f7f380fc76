#pragma once

#include <cstring>
#include <istream>
#include <ostream>

namespace panogeo {

// Little-endian scalar I/O for the binary containers (CMAP, CFDE, FGRD).
// Host byte order is assumed little-endian; a static_assert guards the
// assumption where these helpers are used on multi-byte types.
template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)] = {};
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace panogeo
