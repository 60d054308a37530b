#include "pgrid/rasterops/buffer.h"

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace pgrid::rasterops {

using geo::AffineGeoref;
using geo::ByteRaster;
using geo::Point2;

namespace bg = boost::geometry;

namespace {

using BgPoint = bg::model::d2::point_xy<double>;
using BgLine = bg::model::linestring<BgPoint>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

std::vector<Point2> FromRing(const BgPolygon::ring_type& ring) {
  std::vector<Point2> out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back({p.x(), p.y()});
  if (out.size() >= 2 && out.front() == out.back()) out.pop_back();
  return out;
}

// Inclusive pixel index range covering the world-space box.
struct PixelWindow {
  int c0, c1, r0, r1;
};

PixelWindow WindowFor(double min_x, double min_y, double max_x, double max_y,
                      const AffineGeoref& g, int width, int height) {
  double cmin = 1e300, cmax = -1e300, rmin = 1e300, rmax = -1e300;
  for (double x : {min_x, max_x}) {
    for (double y : {min_y, max_y}) {
      const Point2 p = g.WorldToPixel(x, y);
      cmin = std::min(cmin, p.x);
      cmax = std::max(cmax, p.x);
      rmin = std::min(rmin, p.y);
      rmax = std::max(rmax, p.y);
    }
  }
  PixelWindow w;
  w.c0 = std::max(0, static_cast<int>(std::floor(cmin - 1)));
  w.c1 = std::min(width - 1, static_cast<int>(std::ceil(cmax + 1)));
  w.r0 = std::max(0, static_cast<int>(std::floor(rmin - 1)));
  w.r1 = std::min(height - 1, static_cast<int>(std::ceil(rmax + 1)));
  return w;
}

}  // namespace

ByteRaster BufferPolylines(const geo::PolylineSet& lines, double radius,
                           const AffineGeoref& georef, int width, int height) {
  if (!(radius > 0.0)) throw ValidationError("buffer radius must be > 0");
  ByteRaster out(width, height, 1, georef, 0);
  for (const auto& line : lines.lines) {
    for (std::size_t i = 0; i + 1 < line.vertices.size(); ++i) {
      const Point2& a = line.vertices[i];
      const Point2& b = line.vertices[i + 1];
      const PixelWindow win = WindowFor(
          std::min(a.x, b.x) - radius, std::min(a.y, b.y) - radius,
          std::max(a.x, b.x) + radius, std::max(a.y, b.y) + radius, georef,
          width, height);
      for (int r = win.r0; r <= win.r1; ++r) {
        for (int c = win.c0; c <= win.c1; ++c) {
          if (out(c, r)) continue;
          if (geo::PointSegmentDistance(georef.PixelCenter(c, r), a, b) <=
              radius) {
            out(c, r) = 1;
          }
        }
      }
    }
  }
  return out;
}

geo::PolygonSet VectorBuffer(const geo::PolylineSet& lines, double radius,
                             int points_per_circle) {
  if (!(radius > 0.0)) throw ValidationError("buffer radius must be > 0");
  geo::PolygonSet out;
  out.epsg = lines.epsg;
  const bg::strategy::buffer::distance_symmetric<double> distance(radius);
  const bg::strategy::buffer::join_round join(points_per_circle);
  const bg::strategy::buffer::end_round end(points_per_circle);
  const bg::strategy::buffer::point_circle circle(points_per_circle);
  const bg::strategy::buffer::side_straight side;
  for (const auto& line : lines.lines) {
    BgLine ls;
    for (const auto& v : line.vertices) ls.push_back(BgPoint(v.x, v.y));
    BgMultiPolygon result;
    bg::buffer(ls, result, distance, side, join, end, circle);
    if (result.empty()) continue;
    const auto largest = std::max_element(
        result.begin(), result.end(), [](const auto& p, const auto& q) {
          return bg::area(p) < bg::area(q);
        });
    geo::Polygon poly;
    poly.id = line.id;
    poly.ring = FromRing(largest->outer());
    for (const auto& inner : largest->inners()) {
      poly.holes.push_back(FromRing(inner));
    }
    out.polygons.push_back(std::move(poly));
  }
  return out;
}

ByteRaster RasterizePolygons(const geo::PolygonSet& polygons,
                             const AffineGeoref& georef, int width,
                             int height) {
  ByteRaster out(width, height, 1, georef, 0);
  std::vector<std::vector<Point2>> rings;
  std::vector<double> xs;
  for (const auto& poly : polygons.polygons) {
    // Scan in pixel space; an affine map preserves polygon membership.
    rings.clear();
    double rmin = 1e300, rmax = -1e300;
    auto add_ring = [&](const std::vector<Point2>& ring) {
      std::vector<Point2> px;
      for (const auto& v : ring) {
        px.push_back(georef.WorldToPixel(v.x, v.y));
        rmin = std::min(rmin, px.back().y);
        rmax = std::max(rmax, px.back().y);
      }
      rings.push_back(std::move(px));
    };
    add_ring(poly.ring);
    for (const auto& h : poly.holes) add_ring(h);
    const int r0 = std::max(0, static_cast<int>(std::floor(rmin)));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(rmax)));
    for (int r = r0; r <= r1; ++r) {
      const double y = r + 0.5;
      xs.clear();
      for (const auto& ring : rings) {
        for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
          const Point2& a = ring[i];
          const Point2& b = ring[(i + 1) % n];
          if ((a.y > y) != (b.y > y)) {
            xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
          }
        }
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        // Pixel centers c + 0.5 inside [xs[k], xs[k+1]).
        const int c0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
        const int c1 = std::min(
            width - 1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
        for (int c = c0; c <= c1; ++c) out(c, r) = 1;
      }
    }
  }
  return out;
}

}  // namespace pgrid::rasterops
