#pragma once

#include "panogeo/raster.hpp"

namespace panogeo {

// PSNR in dB with peak 1.0, averaged over pixels valid in both rasters.
// Returns +inf for a zero-error overlap and -inf when no pixel overlaps.
double psnr_masked(const ImageRaster& a, const ImageRaster& b);

// Mean absolute difference over the both-valid overlap; NaN when empty.
double mad_masked(const ImageRaster& a, const ImageRaster& b);

}  // namespace panogeo
