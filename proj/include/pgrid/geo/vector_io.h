#ifndef PGRID_GEO_VECTOR_IO_H_
#define PGRID_GEO_VECTOR_IO_H_

#include <filesystem>
#include <variant>

#include "json.hpp"
#include "pgrid/geo/types.h"

namespace pgrid::geo {

// A GeoJSON FeatureCollection holding a single geometry type.
using VectorLayer = std::variant<PointAnnotations, PolylineSet, PolygonSet>;

nlohmann::json ToGeoJson(const PointAnnotations& points);
nlohmann::json ToGeoJson(const PolylineSet& lines);
nlohmann::json ToGeoJson(const PolygonSet& polygons);
nlohmann::json ToGeoJson(const VectorLayer& layer);

// Parses an RFC 7946 FeatureCollection. An empty collection parses as empty
// PointAnnotations. Throws ValidationError when geometry types are mixed
// (listing the offending feature ids) or when a feature breaks the layer
// invariants.
VectorLayer ParseGeoJson(const nlohmann::json& doc);

VectorLayer ReadVectors(const std::filesystem::path& path);
void WriteVectors(const VectorLayer& layer, const std::filesystem::path& path);

// Typed readers; an empty collection is accepted as an empty layer of the
// requested kind.
PointAnnotations ReadPoints(const std::filesystem::path& path);
PolylineSet ReadPolylines(const std::filesystem::path& path);
PolygonSet ReadPolygons(const std::filesystem::path& path);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
// Writes `doc` with two-space indentation and a trailing newline.
void WriteJsonFile(const nlohmann::json& doc,
                   const std::filesystem::path& path);

}  // namespace pgrid::geo

#endif  // PGRID_GEO_VECTOR_IO_H_
