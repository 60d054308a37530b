#ifndef PGRID_GEO_TYPES_H_
#define PGRID_GEO_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgrid/error.h"

namespace pgrid::geo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

// Six-parameter affine transform from fractional pixel coordinates (col, row)
// to world meters. Integer pixel coordinates address pixel corners; the
// center of pixel (c, r) is at (c + 0.5, r + 0.5).
//
//   x = origin_x + px_w * col + rot_x * row
//   y = origin_y + rot_y * col + px_h * row
//
// epsg == 0 denotes a local Cartesian frame in meters.
struct AffineGeoref {
  double origin_x = 0.0;
  double px_w = 1.0;
  double rot_x = 0.0;
  double origin_y = 0.0;
  double rot_y = 0.0;
  double px_h = -1.0;
  std::uint32_t epsg = 0;

  // North-up georef with square pixels; `top` is the world y of row 0.
  static AffineGeoref NorthUp(double left, double top, double pixel_size,
                              std::uint32_t epsg = 0);

  double Determinant() const { return px_w * px_h - rot_x * rot_y; }
  // Throws ValidationError if the linear part is singular or non-finite.
  void Validate() const;

  Point2 PixelToWorld(double col, double row) const;
  // Returns fractional (col, row) packed as Point2{col, row}.
  Point2 WorldToPixel(double x, double y) const;
  Point2 PixelCenter(int col, int row) const {
    return PixelToWorld(col + 0.5, row + 0.5);
  }
  // Area of one pixel in square meters.
  double PixelArea() const;
  // Side length of a square pixel with the same area.
  double PixelSize() const;

  bool operator==(const AffineGeoref&) const = default;
};

enum class DType : std::uint8_t { kUInt8 = 0, kFloat32 = 1 };

template <typename T>
struct DTypeOf;
template <>
struct DTypeOf<std::uint8_t> {
  static constexpr DType value = DType::kUInt8;
};
template <>
struct DTypeOf<float> {
  static constexpr DType value = DType::kFloat32;
};

// Georeferenced multi-channel raster. Data is channel-planar, row-major:
// index = channel * width * height + row * width + col.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, int channels, const AffineGeoref& georef = {},
         T fill = T{})
      : width_(width), height_(height), channels_(channels), georef_(georef) {
    CheckDims();
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }
  Raster(int width, int height, int channels, std::vector<T> data,
         const AffineGeoref& georef)
      : width_(width),
        height_(height),
        channels_(channels),
        georef_(georef),
        data_(std::move(data)) {
    CheckDims();
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
      throw ValidationError("raster data length " +
                            std::to_string(data_.size()) +
                            " does not match width*height*channels");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return data_.empty(); }

  const AffineGeoref& georef() const { return georef_; }
  void set_georef(const AffineGeoref& g) { georef_ = g; }
  const std::optional<double>& nodata() const { return nodata_; }
  void set_nodata(std::optional<double> v) { nodata_ = v; }

  bool Contains(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  std::size_t Index(int col, int row, int channel = 0) const {
    return static_cast<std::size_t>(channel) * plane_size() +
           static_cast<std::size_t>(row) * width_ + col;
  }

  T& operator()(int col, int row, int channel = 0) {
    return data_[Index(col, row, channel)];
  }
  const T& operator()(int col, int row, int channel = 0) const {
    return data_[Index(col, row, channel)];
  }

  std::span<T> plane(int channel) {
    return std::span<T>(data_).subspan(channel * plane_size(), plane_size());
  }
  std::span<const T> plane(int channel) const {
    return std::span<const T>(data_).subspan(channel * plane_size(),
                                             plane_size());
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool SameGrid(const Raster<U>& other) const {
    return width_ == other.width() && height_ == other.height() &&
           georef_ == other.georef();
  }

  bool operator==(const Raster&) const = default;

 private:
  void CheckDims() const {
    if (width_ < 0 || height_ < 0 || channels_ < 0) {
      throw ValidationError("raster dimensions must be non-negative");
    }
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  AffineGeoref georef_;
  std::optional<double> nodata_;
  std::vector<T> data_;
};

using ByteRaster = Raster<std::uint8_t>;
using FloatRaster = Raster<float>;
using LabelRaster = Raster<std::int32_t>;
// In-memory only (logits, gradients); not a PGRD dtype.
using DoubleRaster = Raster<double>;

// Checks the probability-map invariant for a 2-channel raster: each value in
// [0, 1] and per-pixel channel sum within `tol` of 1.
bool IsProbabilityMap(const FloatRaster& r, double tol = 1e-6);

enum class Polarity { kPole, kHardNegative };

std::string ToString(Polarity p);
Polarity ParsePolarity(const std::string& s);

struct AnnotatedPoint {
  std::int64_t id = 0;
  Point2 position;
  Polarity polarity = Polarity::kPole;
  std::optional<double> confidence;

  bool operator==(const AnnotatedPoint&) const = default;
};

struct PointAnnotations {
  std::vector<AnnotatedPoint> points;
  std::uint32_t epsg = 0;

  // Throws ValidationError on duplicate ids or confidences outside [0, 1].
  void Validate() const;
  PointAnnotations Filter(Polarity polarity) const;
  std::size_t size() const { return points.size(); }

  bool operator==(const PointAnnotations&) const = default;
};

struct Polyline {
  std::int64_t id = 0;
  std::vector<Point2> vertices;
  std::optional<double> confidence;

  double Length() const;
  bool operator==(const Polyline&) const = default;
};

struct PolylineSet {
  std::vector<Polyline> lines;
  std::uint32_t epsg = 0;

  // Every polyline needs >= 2 vertices with no repeated consecutive vertex.
  void Validate() const;
  std::size_t size() const { return lines.size(); }

  bool operator==(const PolylineSet&) const = default;
};

// Polygon with an exterior ring and optional holes. Rings are stored open
// (first vertex not repeated); the exterior is counterclockwise in world
// coordinates and holes are clockwise.
struct Polygon {
  std::int64_t id = 0;
  std::vector<Point2> ring;
  std::vector<std::vector<Point2>> holes;

  // Signed area: exterior minus holes.
  double Area() const;
  // Inside the exterior and outside every hole.
  bool Contains(const Point2& p) const;
  bool operator==(const Polygon&) const = default;
};

struct PolygonSet {
  std::vector<Polygon> polygons;
  std::uint32_t epsg = 0;

  std::size_t size() const { return polygons.size(); }
  bool operator==(const PolygonSet&) const = default;
};

// The unified grid: pole points, line skeletons and buffered corridors.
struct GridLayout {
  PointAnnotations poles;
  PolylineSet line_skeletons;
  PolygonSet line_polygons;
  nlohmann::json provenance = nlohmann::json::object();
};

// Integer pixel location of an annotation; used by the losses and trainers.
struct PixelPoint {
  std::int64_t id = 0;
  int col = 0;
  int row = 0;

  bool operator==(const PixelPoint&) const = default;
};

// Maps world points of the given polarity to the pixels that contain them.
// Throws ValidationError naming the point id if a point falls outside the
// width x height grid.
std::vector<PixelPoint> ToPixelPoints(const PointAnnotations& points,
                                      Polarity polarity,
                                      const AffineGeoref& georef, int width,
                                      int height);

double Distance(const Point2& a, const Point2& b);
double PointSegmentDistance(const Point2& p, const Point2& a, const Point2& b);

}  // namespace pgrid::geo

#endif  // PGRID_GEO_TYPES_H_
