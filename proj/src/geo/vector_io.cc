#include "pgrid/geo/vector_io.h"

#include <fstream>
#include <string>

namespace pgrid::geo {
namespace {

using nlohmann::json;

json Coord(const Point2& p) { return json::array({p.x, p.y}); }

Point2 ParseCoord(const json& c, std::int64_t id) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() ||
      !c[1].is_number()) {
    throw ValidationError("feature " + std::to_string(id) +
                          " has a malformed coordinate");
  }
  return {c[0].get<double>(), c[1].get<double>()};
}

json Collection(std::uint32_t epsg, json features) {
  json doc;
  doc["type"] = "FeatureCollection";
  doc["epsg"] = epsg;
  doc["features"] = std::move(features);
  return doc;
}

json Feature(std::int64_t id, json geometry, json properties) {
  json f;
  f["type"] = "Feature";
  f["id"] = id;
  f["geometry"] = std::move(geometry);
  properties["id"] = id;
  f["properties"] = std::move(properties);
  return f;
}

std::int64_t FeatureId(const json& f, std::size_t index) {
  if (f.contains("properties") && f["properties"].is_object() &&
      f["properties"].contains("id") && f["properties"]["id"].is_number()) {
    return f["properties"]["id"].get<std::int64_t>();
  }
  if (f.contains("id") && f["id"].is_number()) {
    return f["id"].get<std::int64_t>();
  }
  return static_cast<std::int64_t>(index);
}

std::optional<double> Confidence(const json& props) {
  if (props.is_object() && props.contains("confidence") &&
      !props["confidence"].is_null()) {
    return props["confidence"].get<double>();
  }
  return std::nullopt;
}

}  // namespace

json ToGeoJson(const PointAnnotations& points) {
  json features = json::array();
  for (const auto& p : points.points) {
    json props = json::object();
    props["polarity"] = ToString(p.polarity);
    if (p.confidence) props["confidence"] = *p.confidence;
    features.push_back(Feature(
        p.id, json{{"type", "Point"}, {"coordinates", Coord(p.position)}},
        std::move(props)));
  }
  return Collection(points.epsg, std::move(features));
}

json ToGeoJson(const PolylineSet& lines) {
  json features = json::array();
  for (const auto& l : lines.lines) {
    json coords = json::array();
    for (const auto& v : l.vertices) coords.push_back(Coord(v));
    json props = json::object();
    if (l.confidence) props["confidence"] = *l.confidence;
    features.push_back(
        Feature(l.id, json{{"type", "LineString"}, {"coordinates", coords}},
                std::move(props)));
  }
  return Collection(lines.epsg, std::move(features));
}

json ToGeoJson(const PolygonSet& polygons) {
  json features = json::array();
  auto closed = [](const std::vector<Point2>& ring) {
    json out = json::array();
    for (const auto& v : ring) out.push_back(Coord(v));
    if (!ring.empty()) out.push_back(Coord(ring.front()));
    return out;
  };
  for (const auto& poly : polygons.polygons) {
    json rings = json::array({closed(poly.ring)});
    for (const auto& h : poly.holes) rings.push_back(closed(h));
    features.push_back(
        Feature(poly.id, json{{"type", "Polygon"}, {"coordinates", rings}},
                json::object()));
  }
  return Collection(polygons.epsg, std::move(features));
}

json ToGeoJson(const VectorLayer& layer) {
  return std::visit([](const auto& l) { return ToGeoJson(l); }, layer);
}

VectorLayer ParseGeoJson(const json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw ValidationError("expected a GeoJSON FeatureCollection");
  }
  const std::uint32_t epsg = doc.value("epsg", 0u);
  const json& features = doc["features"];
  if (features.empty()) {
    PointAnnotations empty;
    empty.epsg = epsg;
    return empty;
  }

  std::string kind;
  std::string offending;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& f = features[i];
    if (!f.contains("geometry") || !f["geometry"].is_object()) {
      throw ValidationError("feature " + std::to_string(FeatureId(f, i)) +
                            " has no geometry");
    }
    const std::string type = f["geometry"].value("type", "");
    if (type != "Point" && type != "LineString" && type != "Polygon") {
      throw ValidationError("feature " + std::to_string(FeatureId(f, i)) +
                            " has unsupported geometry '" + type + "'");
    }
    if (kind.empty()) kind = type;
    if (type != kind) {
      if (!offending.empty()) offending += ", ";
      offending += std::to_string(FeatureId(f, i));
    }
  }
  if (!offending.empty()) {
    throw ValidationError("mixed geometry types in one layer (expected " +
                          kind + "); offending feature ids: " + offending);
  }

  if (kind == "Point") {
    PointAnnotations out;
    out.epsg = epsg;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const json& f = features[i];
      const json props = f.value("properties", json::object());
      AnnotatedPoint p;
      p.id = FeatureId(f, i);
      p.position = ParseCoord(f["geometry"]["coordinates"], p.id);
      p.polarity = ParsePolarity(
          props.is_object() ? props.value("polarity", "pole") : "pole");
      p.confidence = Confidence(props);
      out.points.push_back(p);
    }
    out.Validate();
    return out;
  }
  if (kind == "LineString") {
    PolylineSet out;
    out.epsg = epsg;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const json& f = features[i];
      Polyline l;
      l.id = FeatureId(f, i);
      const json& coords = f["geometry"]["coordinates"];
      if (!coords.is_array()) {
        throw ValidationError("feature " + std::to_string(l.id) +
                              " has malformed coordinates");
      }
      for (const auto& c : coords) l.vertices.push_back(ParseCoord(c, l.id));
      l.confidence = Confidence(f.value("properties", json::object()));
      out.lines.push_back(std::move(l));
    }
    out.Validate();
    return out;
  }
  PolygonSet out;
  out.epsg = epsg;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& f = features[i];
    Polygon poly;
    poly.id = FeatureId(f, i);
    const json& rings = f["geometry"]["coordinates"];
    if (!rings.is_array() || rings.empty()) {
      throw ValidationError("polygon " + std::to_string(poly.id) +
                            " has no rings");
    }
    for (std::size_t k = 0; k < rings.size(); ++k) {
      if (!rings[k].is_array()) {
        throw ValidationError("polygon " + std::to_string(poly.id) +
                              " has a malformed ring");
      }
      std::vector<Point2> ring;
      for (const auto& c : rings[k]) ring.push_back(ParseCoord(c, poly.id));
      if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
      if (ring.size() < 3) {
        throw ValidationError("polygon " + std::to_string(poly.id) +
                              " has a ring with fewer than 3 vertices");
      }
      if (k == 0) {
        poly.ring = std::move(ring);
      } else {
        poly.holes.push_back(std::move(ring));
      }
    }
    out.polygons.push_back(std::move(poly));
  }
  return out;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw Error("short write to " + path.string());
}

VectorLayer ReadVectors(const std::filesystem::path& path) {
  try {
    return ParseGeoJson(ReadJsonFile(path));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void WriteVectors(const VectorLayer& layer,
                  const std::filesystem::path& path) {
  WriteJsonFile(ToGeoJson(layer), path);
}

namespace {

template <typename T>
T ReadTyped(const std::filesystem::path& path, const char* what) {
  VectorLayer layer = ReadVectors(path);
  if (auto* t = std::get_if<T>(&layer)) return std::move(*t);
  // An empty collection decodes as points; accept it for any layer kind.
  if (auto* p = std::get_if<PointAnnotations>(&layer); p && p->points.empty()) {
    T empty;
    empty.epsg = p->epsg;
    return empty;
  }
  throw ValidationError(path.string() + ": expected a layer of " + what);
}

}  // namespace

PointAnnotations ReadPoints(const std::filesystem::path& path) {
  return ReadTyped<PointAnnotations>(path, "Point features");
}

PolylineSet ReadPolylines(const std::filesystem::path& path) {
  return ReadTyped<PolylineSet>(path, "LineString features");
}

PolygonSet ReadPolygons(const std::filesystem::path& path) {
  return ReadTyped<PolygonSet>(path, "Polygon features");
}

}  // namespace pgrid::geo
