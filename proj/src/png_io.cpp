#include "panogeo/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "panogeo/binio.hpp"

namespace panogeo {

namespace {

std::uint8_t to_byte(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

void write_png_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes,
                     int width, int height, int channels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error("write_png: " + path + ": " + msg);
  }
}

}  // namespace

ImageRaster read_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error("read_png: " + path + ": " + msg);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error("read_png: " + path + ": " + msg);
  }
  ImageRaster img = ImageRaster::zeros(static_cast<int>(image.width),
                                       static_cast<int>(image.height), 3);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = bytes[i] / 255.0;
  return img;
}

void write_png(const std::string& path, const ImageRaster& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("write_png: expected 1 or 3 channels");
  std::vector<std::uint8_t> bytes(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) bytes[i] = to_byte(img.data[i]);
  write_png_bytes(path, bytes, img.width, img.height, img.channels);
}

void write_inpaint_mask_png(const std::string& path, const ImageRaster& img) {
  std::vector<std::uint8_t> bytes(img.mask.size());
  for (std::size_t i = 0; i < img.mask.size(); ++i)
    bytes[i] = img.mask[i] ? 0 : 255;
  write_png_bytes(path, bytes, img.width, img.height, 1);
}

void write_fgrid(const std::string& path, const ImageRaster& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_fgrid: cannot open " + path);
  os.write("FGRD", 4);
  put_le<std::uint32_t>(os, 1);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(img.width));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(img.height));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(img.channels));
  for (double v : img.data) put_le<float>(os, static_cast<float>(v));
  os.write(reinterpret_cast<const char*>(img.mask.data()),
           static_cast<std::streamsize>(img.mask.size()));
  if (!os) throw std::runtime_error("write_fgrid: write failed for " + path);
}

ImageRaster read_fgrid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_fgrid: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "FGRD", 4) != 0)
    throw std::runtime_error("read_fgrid: bad magic in " + path);
  const auto version = get_le<std::uint32_t>(is);
  if (version != 1) throw std::runtime_error("read_fgrid: unsupported version");
  const auto w = get_le<std::uint32_t>(is);
  const auto h = get_le<std::uint32_t>(is);
  const auto c = get_le<std::uint32_t>(is);
  if (w > 1u << 20 || h > 1u << 20 || c > 1u << 16)
    throw std::runtime_error("read_fgrid: implausible header in " + path);
  ImageRaster img = ImageRaster::zeros(static_cast<int>(w), static_cast<int>(h),
                                       static_cast<int>(c));
  for (double& v : img.data) v = get_le<float>(is);
  is.read(reinterpret_cast<char*>(img.mask.data()),
          static_cast<std::streamsize>(img.mask.size()));
  if (!is) throw std::runtime_error("read_fgrid: truncated file " + path);
  return img;
}

}  // namespace panogeo
