#ifndef PGRID_UNIFY_UNIFY_H_
#define PGRID_UNIFY_UNIFY_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pgrid/geo/types.h"

namespace pgrid::unify {

// About 0.03 m^2 at 6 cm pixels.
inline constexpr int kDefaultMinAreaPx = 8;
inline constexpr double kDefaultCorridorRadius = 2.0;
inline constexpr int kDefaultSpurPx = 10;

// Pole points from a probability map: threshold the pole plane (channel 1 of
// a two-channel map, channel 0 of a single-channel one), drop 8-connected
// blobs smaller than min_area_px, and emit each blob's pixel-centre mean in
// world coordinates with the blob's peak probability as confidence. Ids are
// 1..n in blob order.
geo::PointAnnotations ExtractPoles(const geo::FloatRaster& prob,
                                   double threshold = 0.5,
                                   int min_area_px = kDefaultMinAreaPx);

struct LineLayers {
  geo::PolylineSet skeletons;
  geo::PolygonSet corridors;
};

// Clears one pixel (the top-left) of every 2x2 block a skeleton still holds.
geo::ByteRaster BreakBlocks(geo::ByteRaster skeleton);

// Threshold, thin, prune spurs of up to spur_px pixels, trace and buffer:
// skeleton polylines shorter than two
// pixels are dropped, the rest are simplified with a one-pixel Douglas-Peucker
// tolerance and become corridor polygons of the given radius carrying the
// polyline ids.
LineLayers ExtractLines(const geo::FloatRaster& line_prob, double threshold = 0.5,
                        double corridor_radius = kDefaultCorridorRadius,
                        int spur_px = kDefaultSpurPx);

// Stacks the layers without joining poles to lines. Throws ValidationError
// if the layers' EPSG codes differ.
geo::GridLayout Unify(const geo::PointAnnotations& poles, const LineLayers& lines,
                      nlohmann::json provenance = nlohmann::json::object());

using Edge = std::pair<std::int64_t, std::int64_t>;

// Pole pairs (smaller id first, sorted, unique) joined by a skeleton whose two
// end points lie within tol of two distinct poles. Each end snaps to its
// nearest pole. Throws ValidationError if tol <= 0.
std::vector<Edge> SnapGraph(const geo::GridLayout& layout, double tol);

// True when the undirected edge set has no cycle.
bool IsForest(const std::vector<Edge>& edges);

struct LayoutPaths {
  std::filesystem::path poles;
  std::filesystem::path lines;
  std::filesystem::path corridors;
};

LayoutPaths LayoutFiles(const std::filesystem::path& dir, const std::string& stem);

// Three FeatureCollections named <stem>.poles/.lines/.corridors.geojson; the
// provenance is copied into each as a foreign member.
LayoutPaths WriteLayout(const geo::GridLayout& layout,
                        const std::filesystem::path& dir, const std::string& stem);
geo::GridLayout ReadLayout(const std::filesystem::path& dir, const std::string& stem);

}  // namespace pgrid::unify

#endif  // PGRID_UNIFY_UNIFY_H_
