#ifndef PGRID_RASTEROPS_POLYGONIZE_H_
#define PGRID_RASTEROPS_POLYGONIZE_H_

#include "pgrid/geo/types.h"

namespace pgrid::rasterops {

// Traces the outer boundary of every 8-connected blob along pixel edges.
// Vertices sit on pixel corners (collinear runs merged) and are mapped to
// world coordinates with the mask's georef. Polygons are emitted in blob
// label order with ids 1..n; holes are not traced.
geo::PolygonSet Polygonize(const geo::ByteRaster& mask);

// Walks a one-pixel-wide skeleton into polylines through pixel centers.
//
// Pixels are linked by 8-adjacency, except that a diagonal link is dropped
// when the two pixels already share a 4-neighbour in the skeleton. Chains are
// split at junctions (three or more links) and end at end points; closed
// loops come back as polylines whose last vertex repeats the first.
// Isolated pixels produce nothing. Throws ValidationError if the input has a
// 2x2 foreground block.
geo::PolylineSet SkeletonToPolylines(const geo::ByteRaster& skeleton);

// Removes branches that run from a free end to a junction in at most
// max_length pixels, repeating until none is left. Uses the same links as
// SkeletonToPolylines. Chains with two free ends are kept whatever their
// length.
geo::ByteRaster PruneSpurs(const geo::ByteRaster& skeleton, int max_length);

}  // namespace pgrid::rasterops

#endif  // PGRID_RASTEROPS_POLYGONIZE_H_
