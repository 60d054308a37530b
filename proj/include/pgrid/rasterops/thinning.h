#ifndef PGRID_RASTEROPS_THINNING_H_
#define PGRID_RASTEROPS_THINNING_H_

#include "pgrid/geo/types.h"

namespace pgrid::rasterops {

// Zhang-Suen thinning of a single-channel binary mask.
//
// Each sub-iteration marks candidates on a snapshot of the image, as in the
// classic algorithm, and then deletes them in row-major order, re-checking
// the Zhang-Suen conditions against the partially updated image. The
// re-check stops the parallel deletion from erasing 2x2 squares and
// two-pixel diagonal strokes outright. A pixel whose only two neighbours are
// side by side counts as an end point, so thick diagonal strokes keep their
// length. A final pass removes one pixel from
// any remaining 2x2 foreground block whose removal leaves the component
// connected.
//
// The result is a subset of the input, keeps the number of 8-connected
// components, and contains no 2x2 foreground block except where removing any
// of its pixels would disconnect the skeleton.
geo::ByteRaster Skeletonize(const geo::ByteRaster& mask);

// True when no 2x2 window is entirely foreground.
bool IsThin(const geo::ByteRaster& mask);

}  // namespace pgrid::rasterops

#endif  // PGRID_RASTEROPS_THINNING_H_
