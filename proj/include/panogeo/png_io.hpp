#pragma once

#include <string>

#include "panogeo/raster.hpp"

namespace panogeo {

// Reads an 8-bit PNG as RGB. Values map to [0, 1] via v = byte / 255.
// The mask comes back all-valid. Throws std::runtime_error on failure.
ImageRaster read_png(const std::string& path);

// Writes a 1- or 3-channel raster as an 8-bit PNG (gray or RGB).
// byte = floor(clamp(v, 0, 1) * 255 + 0.5). The mask is ignored; use
// write_inpaint_mask_png to persist it. Output bytes are deterministic.
void write_png(const std::string& path, const ImageRaster& img);

// Writes the validity mask as an 8-bit gray PNG in inpainting convention:
// 0 = valid (keep), 255 = invalid (to fill).
void write_inpaint_mask_png(const std::string& path, const ImageRaster& img);

// Binary feature-grid container for non-image rasters (arbitrary channel
// count, full double precision is not kept; values are stored as f32).
// Layout: "FGRD" magic, u32 version = 1, u32 width, u32 height,
// u32 channels, then width*height*channels f32 values row-major, then
// width*height u8 mask bytes. Little-endian, packed.
void write_fgrid(const std::string& path, const ImageRaster& img);
ImageRaster read_fgrid(const std::string& path);

}  // namespace panogeo
