#include "pgrid/geo/types.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace pgrid::geo {

AffineGeoref AffineGeoref::NorthUp(double left, double top, double pixel_size,
                                   std::uint32_t epsg) {
  AffineGeoref g;
  g.origin_x = left;
  g.origin_y = top;
  g.px_w = pixel_size;
  g.px_h = -pixel_size;
  g.rot_x = 0.0;
  g.rot_y = 0.0;
  g.epsg = epsg;
  return g;
}

void AffineGeoref::Validate() const {
  const double det = Determinant();
  if (!std::isfinite(det) || det == 0.0 || !std::isfinite(origin_x) ||
      !std::isfinite(origin_y)) {
    throw ValidationError("affine georeference is singular or non-finite");
  }
}

Point2 AffineGeoref::PixelToWorld(double col, double row) const {
  return {origin_x + px_w * col + rot_x * row,
          origin_y + rot_y * col + px_h * row};
}

Point2 AffineGeoref::WorldToPixel(double x, double y) const {
  const double det = Determinant();
  const double dx = x - origin_x;
  const double dy = y - origin_y;
  return {(px_h * dx - rot_x * dy) / det, (-rot_y * dx + px_w * dy) / det};
}

double AffineGeoref::PixelArea() const { return std::abs(Determinant()); }

double AffineGeoref::PixelSize() const { return std::sqrt(PixelArea()); }

bool IsProbabilityMap(const FloatRaster& r, double tol) {
  if (r.channels() != 2) return false;
  const auto bg = r.plane(0);
  const auto fg = r.plane(1);
  for (std::size_t i = 0; i < bg.size(); ++i) {
    if (!(bg[i] >= 0.0f && bg[i] <= 1.0f && fg[i] >= 0.0f && fg[i] <= 1.0f)) {
      return false;
    }
    if (std::abs(static_cast<double>(bg[i]) + fg[i] - 1.0) > tol) return false;
  }
  return true;
}

std::string ToString(Polarity p) {
  return p == Polarity::kPole ? "pole" : "hard_negative";
}

Polarity ParsePolarity(const std::string& s) {
  if (s == "pole") return Polarity::kPole;
  if (s == "hard_negative") return Polarity::kHardNegative;
  throw ValidationError("unknown polarity '" + s + "'");
}

void PointAnnotations::Validate() const {
  std::set<std::int64_t> ids;
  for (const auto& p : points) {
    if (!ids.insert(p.id).second) {
      throw ValidationError("duplicate point id " + std::to_string(p.id));
    }
    if (p.confidence && !(*p.confidence >= 0.0 && *p.confidence <= 1.0)) {
      throw ValidationError("confidence of point " + std::to_string(p.id) +
                            " outside [0, 1]");
    }
    if (!std::isfinite(p.position.x) || !std::isfinite(p.position.y)) {
      throw ValidationError("non-finite coordinate on point " +
                            std::to_string(p.id));
    }
  }
}

PointAnnotations PointAnnotations::Filter(Polarity polarity) const {
  PointAnnotations out;
  out.epsg = epsg;
  for (const auto& p : points) {
    if (p.polarity == polarity) out.points.push_back(p);
  }
  return out;
}

double Polyline::Length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    len += Distance(vertices[i - 1], vertices[i]);
  }
  return len;
}

void PolylineSet::Validate() const {
  std::set<std::int64_t> ids;
  for (const auto& line : lines) {
    const std::string tag = "polyline " + std::to_string(line.id);
    if (!ids.insert(line.id).second) {
      throw ValidationError("duplicate " + tag);
    }
    if (line.vertices.size() < 2) {
      throw ValidationError(tag + " has fewer than 2 vertices");
    }
    for (std::size_t i = 1; i < line.vertices.size(); ++i) {
      if (line.vertices[i] == line.vertices[i - 1]) {
        throw ValidationError(tag + " repeats vertex " + std::to_string(i));
      }
    }
  }
}

namespace {

double RingArea(const std::vector<Point2>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point2& a = ring[i];
    const Point2& b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool RingContains(const std::vector<Point2>& ring, const Point2& p) {
  bool inside = false;
  for (std::size_t i = 0, n = ring.size(), j = n - 1; i < n; j = i++) {
    const Point2& a = ring[i];
    const Point2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

}  // namespace

double Polygon::Area() const {
  double area = RingArea(ring);
  for (const auto& h : holes) area += RingArea(h);
  return area;
}

bool Polygon::Contains(const Point2& p) const {
  if (!RingContains(ring, p)) return false;
  for (const auto& h : holes) {
    if (RingContains(h, p)) return false;
  }
  return true;
}

std::vector<PixelPoint> ToPixelPoints(const PointAnnotations& points,
                                      Polarity polarity,
                                      const AffineGeoref& georef, int width,
                                      int height) {
  std::vector<PixelPoint> out;
  for (const auto& p : points.points) {
    if (p.polarity != polarity) continue;
    const Point2 px = georef.WorldToPixel(p.position.x, p.position.y);
    const int col = static_cast<int>(std::floor(px.x));
    const int row = static_cast<int>(std::floor(px.y));
    if (col < 0 || row < 0 || col >= width || row >= height) {
      throw ValidationError("point " + std::to_string(p.id) +
                            " lies outside the raster");
    }
    out.push_back({p.id, col, row});
  }
  return out;
}

double Distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double PointSegmentDistance(const Point2& p, const Point2& a,
                            const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace pgrid::geo
