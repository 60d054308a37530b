#ifndef PGRID_RASTEROPS_BUFFER_H_
#define PGRID_RASTEROPS_BUFFER_H_

#include "pgrid/geo/types.h"

namespace pgrid::rasterops {

// Rasterizes a distance corridor: pixel (c, r) is 1 iff its center lies
// within `radius` meters of some polyline segment. The output grid is
// width x height with the given georef. Throws ValidationError if
// radius <= 0.
geo::ByteRaster BufferPolylines(const geo::PolylineSet& lines, double radius,
                                const geo::AffineGeoref& georef, int width,
                                int height);

// Vector corridor around each polyline: round joins and round caps, arcs
// approximated with `points_per_circle` vertices. Returns one polygon per
// input polyline, in input order, carrying the polyline's id.
geo::PolygonSet VectorBuffer(const geo::PolylineSet& lines, double radius,
                             int points_per_circle = 72);

// Burns polygons into a raster: pixel is 1 iff its center is inside some
// polygon.
geo::ByteRaster RasterizePolygons(const geo::PolygonSet& polygons,
                                  const geo::AffineGeoref& georef, int width,
                                  int height);

}  // namespace pgrid::rasterops

#endif  // PGRID_RASTEROPS_BUFFER_H_
