#include "pgrid/unify/unify.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/point_xy.hpp>

#include "pgrid/geo/vector_io.h"
#include "pgrid/rasterops/buffer.h"
#include "pgrid/rasterops/components.h"
#include "pgrid/rasterops/polygonize.h"
#include "pgrid/rasterops/thinning.h"

namespace pgrid::unify {

using geo::ByteRaster;
using geo::FloatRaster;

namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgLine = bg::model::linestring<BgPoint>;

// Douglas-Peucker: removes the pixel staircase of traced skeletons.
std::vector<geo::Point2> Simplify(const std::vector<geo::Point2>& v, double tol) {
  BgLine in, out;
  for (const auto& p : v) in.emplace_back(p.x, p.y);
  bg::simplify(in, out, tol);
  std::vector<geo::Point2> r;
  for (const auto& p : out) r.push_back({p.x(), p.y()});
  return r;
}

}  // namespace

geo::PointAnnotations ExtractPoles(const FloatRaster& prob, double threshold,
                                   int min_area_px) {
  if (prob.channels() != 1 && prob.channels() != 2) {
    throw ShapeError("pole probability raster must have 1 or 2 channels");
  }
  const int ch = prob.channels() - 1;
  const auto blobs = rasterops::ConnectedComponents(
      rasterops::Threshold(prob, ch, static_cast<float>(threshold)), 8);
  const int n = blobs.blob_count;
  std::vector<double> sc(n + 1, 0.0), sr(n + 1, 0.0), peak(n + 1, 0.0);
  for (int r = 0; r < prob.height(); ++r) {
    for (int c = 0; c < prob.width(); ++c) {
      const int k = blobs.labels(c, r);
      if (k == 0) continue;
      sc[k] += c + 0.5;
      sr[k] += r + 0.5;
      peak[k] = std::max(peak[k], static_cast<double>(prob(c, r, ch)));
    }
  }
  geo::PointAnnotations out;
  out.epsg = prob.georef().epsg;
  std::int64_t id = 1;
  for (int k = 1; k <= n; ++k) {
    const double area = static_cast<double>(blobs.stats[k - 1].area);
    if (area < min_area_px) continue;
    out.points.push_back({id++, prob.georef().PixelToWorld(sc[k] / area, sr[k] / area),
                          geo::Polarity::kPole, peak[k]});
  }
  return out;
}

ByteRaster BreakBlocks(ByteRaster s) {
  for (int r = 0; r + 1 < s.height(); ++r) {
    for (int c = 0; c + 1 < s.width(); ++c) {
      if (s(c, r) && s(c + 1, r) && s(c, r + 1) && s(c + 1, r + 1)) s(c, r) = 0;
    }
  }
  return s;
}

LineLayers ExtractLines(const FloatRaster& line_prob, double threshold,
                        double corridor_radius, int spur_px) {
  if (line_prob.channels() != 1 && line_prob.channels() != 2) {
    throw ShapeError("line probability raster must have 1 or 2 channels");
  }
  const ByteRaster mask =
      rasterops::Threshold(line_prob, line_prob.channels() - 1, static_cast<float>(threshold));
  ByteRaster skeleton = rasterops::Skeletonize(mask);
  if (!rasterops::IsThin(skeleton)) skeleton = BreakBlocks(std::move(skeleton));
  skeleton = rasterops::PruneSpurs(skeleton, spur_px);
  const geo::PolylineSet traced = rasterops::SkeletonToPolylines(skeleton);

  LineLayers out;
  out.skeletons.epsg = line_prob.georef().epsg;
  const double min_len = 2.0 * line_prob.georef().PixelSize();
  std::int64_t id = 1;
  for (const auto& line : traced.lines) {
    if (line.Length() < min_len) continue;
    geo::Polyline kept = line;
    kept.id = id++;
    kept.vertices = Simplify(line.vertices, line_prob.georef().PixelSize());
    out.skeletons.lines.push_back(std::move(kept));
  }
  out.corridors = rasterops::VectorBuffer(out.skeletons, corridor_radius);
  out.corridors.epsg = out.skeletons.epsg;
  return out;
}

geo::GridLayout Unify(const geo::PointAnnotations& poles, const LineLayers& lines,
                      nlohmann::json provenance) {
  if (poles.epsg != lines.skeletons.epsg || poles.epsg != lines.corridors.epsg) {
    throw ValidationError("pole layer EPSG:" + std::to_string(poles.epsg) +
                          " and line layer EPSG:" + std::to_string(lines.skeletons.epsg) +
                          " differ");
  }
  geo::GridLayout out;
  out.poles = poles;
  out.line_skeletons = lines.skeletons;
  out.line_polygons = lines.corridors;
  out.provenance = std::move(provenance);
  return out;
}

std::vector<Edge> SnapGraph(const geo::GridLayout& layout, double tol) {
  if (!(tol > 0.0)) throw ValidationError("snap tolerance must be positive");
  std::vector<const geo::AnnotatedPoint*> poles;
  for (const auto& p : layout.poles.points) {
    if (p.polarity == geo::Polarity::kPole) poles.push_back(&p);
  }
  auto nearest = [&](const geo::Point2& q) -> const geo::AnnotatedPoint* {
    const geo::AnnotatedPoint* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto* p : poles) {
      const double d = geo::Distance(p->position, q);
      if (d > tol) continue;
      if (d < best_d || (d == best_d && p->id < best->id)) {
        best = p;
        best_d = d;
      }
    }
    return best;
  };
  std::vector<Edge> edges;
  for (const auto& line : layout.line_skeletons.lines) {
    if (line.vertices.size() < 2) continue;
    const auto* a = nearest(line.vertices.front());
    const auto* b = nearest(line.vertices.back());
    if (a == nullptr || b == nullptr || a->id == b->id) continue;
    edges.emplace_back(std::min(a->id, b->id), std::max(a->id, b->id));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

bool IsForest(const std::vector<Edge>& edges) {
  std::vector<std::int64_t> ids;
  for (const auto& [a, b] : edges) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto index = [&](std::int64_t id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (const auto& [a, b] : edges) {
    const std::size_t ra = find(index(a));
    const std::size_t rb = find(index(b));
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

LayoutPaths LayoutFiles(const std::filesystem::path& dir, const std::string& stem) {
  return {dir / (stem + ".poles.geojson"), dir / (stem + ".lines.geojson"),
          dir / (stem + ".corridors.geojson")};
}

LayoutPaths WriteLayout(const geo::GridLayout& layout, const std::filesystem::path& dir,
                        const std::string& stem) {
  const LayoutPaths paths = LayoutFiles(dir, stem);
  auto write = [&](nlohmann::json doc, const std::filesystem::path& p) {
    doc["provenance"] = layout.provenance;
    geo::WriteJsonFile(doc, p);
  };
  write(geo::ToGeoJson(layout.poles), paths.poles);
  write(geo::ToGeoJson(layout.line_skeletons), paths.lines);
  write(geo::ToGeoJson(layout.line_polygons), paths.corridors);
  return paths;
}

geo::GridLayout ReadLayout(const std::filesystem::path& dir, const std::string& stem) {
  const LayoutPaths paths = LayoutFiles(dir, stem);
  geo::GridLayout out;
  out.poles = geo::ReadPoints(paths.poles);
  out.line_skeletons = geo::ReadPolylines(paths.lines);
  out.line_polygons = geo::ReadPolygons(paths.corridors);
  const auto doc = geo::ReadJsonFile(paths.poles);
  if (doc.contains("provenance")) out.provenance = doc["provenance"];
  return out;
}

}  // namespace pgrid::unify
