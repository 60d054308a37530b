#ifndef PGRID_RASTEROPS_RESAMPLE_H_
#define PGRID_RASTEROPS_RESAMPLE_H_

#include "pgrid/geo/types.h"

namespace pgrid::rasterops {

// Bilinear resampling with the align-corners-false convention: output pixel
// center (x + 0.5) maps to source coordinate (x + 0.5) * in / out - 0.5,
// clamped to the source grid. Every channel is resampled independently and
// the georef is rescaled so the world extent is preserved.
geo::FloatRaster BilinearResample(const geo::FloatRaster& src, int out_width,
                                  int out_height);

}  // namespace pgrid::rasterops

#endif  // PGRID_RASTEROPS_RESAMPLE_H_
