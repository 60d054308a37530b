#ifndef PGRID_RASTEROPS_WATERSHED_H_
#define PGRID_RASTEROPS_WATERSHED_H_

#include <span>

#include "pgrid/geo/types.h"

namespace pgrid::rasterops {

struct WatershedResult {
  // Seed k (0-based) owns label k + 1. Ridge pixels and pixels outside the
  // mask are 0.
  geo::LabelRaster regions;
  // 1 where two or more regions meet.
  geo::ByteRaster ridge;
};

// Seeded priority-flood watershed over `topography`, restricted to the
// nonzero pixels of `region_mask`, using 8-connectivity.
//
// Pixels are flooded in ascending topography with ties broken by row-major
// index. A popped pixel whose labelled neighbours carry two or more distinct
// labels becomes ridge and does not propagate. Mask pixels cut off from every
// region by ridge pixels are marked ridge as well; mask components without a
// seed stay unlabelled.
//
// Throws ValidationError naming the seed id when a seed lies outside the mask
// or repeats another seed's pixel.
WatershedResult Watershed(const geo::FloatRaster& topography,
                          std::span<const geo::PixelPoint> seeds,
                          const geo::ByteRaster& region_mask);

}  // namespace pgrid::rasterops

#endif  // PGRID_RASTEROPS_WATERSHED_H_
