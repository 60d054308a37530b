#ifndef PGRID_SYNTH_SYNTH_H_
#define PGRID_SYNTH_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "json.hpp"
#include "pgrid/geo/types.h"
#include "pgrid/unify/unify.h"

namespace pgrid::synth {

struct SceneConfig {
  double extent_x = 120.0;  // meters
  double extent_y = 120.0;
  double resolution = 0.06;  // meters per pixel
  double spacing_min = 25.0;
  double spacing_max = 40.0;
  // Branches grown off the trunk, each up to max_branch_spans spans.
  int branch_count = 3;
  int max_branch_spans = 4;
  double shadow_azimuth_deg = 135.0;
  // Shadow length quantile targets: P(L < 5 m) and P(L <= 10 m).
  double shadow_p_under_5m = 0.28;
  double shadow_p_upto_10m = 0.90;
  double line_visibility = 0.9;
  // Lines stop this far short of each pole.
  double line_gap_m = 0.5;
  // Distractors per hectare.
  double fence_density = 0.5;
  double tree_density = 2.0;
  double lone_pole_density = 0.3;
  // Standard deviation of per-pixel Gaussian noise on [0, 1] intensities.
  double noise = 0.03;
  std::uint64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static SceneConfig FromJson(const nlohmann::json& j);
};

// Lognormal shadow lengths (meters) fitted to the two quantile targets.
struct ShadowModel {
  double mu = 0.0;
  double sigma = 1.0;

  static ShadowModel Calibrate(double p_under_5m, double p_upto_10m);
  double Cdf(double length) const;
  double Sample(std::mt19937_64& rng) const;
};

struct Scene {
  SceneConfig config;
  geo::ByteRaster image;  // 3 channels
  geo::PointAnnotations poles;
  // One two-vertex polyline per span; span k joins edges[k].
  geo::PolylineSet lines;
  geo::PointAnnotations negatives;
  std::vector<unify::Edge> edges;
  std::vector<bool> line_visible;
  // Pole head radius in pixels, indexed like poles.points.
  std::vector<double> head_radius_px;
  // Pixels covered by rendered line strokes.
  geo::ByteRaster line_pixels;
};

// Throws ValidationError for invalid configs or an extent that cannot hold
// one span.
Scene GenerateScene(const SceneConfig& config, std::uint64_t seed);

struct OraclePredictions {
  geo::FloatRaster poles;  // 2-channel probability map
  geo::FloatRaster lines;  // 1 channel
};

// Pole probability 1 - eps within two pixels of each pole head and eps
// elsewhere; line probability 1 on rendered line pixels and 0 elsewhere.
OraclePredictions OraclePredict(const Scene& scene, double eps = 1e-3);

// image.pgr, poles.geojson, lines.geojson, negatives.geojson, edges.json,
// config.json.
void WriteScene(const Scene& scene, const std::filesystem::path& dir);
// Reads a bundle back; line_pixels and head radii are not stored and come
// back empty.
Scene ReadScene(const std::filesystem::path& dir);

}  // namespace pgrid::synth

#endif  // PGRID_SYNTH_SYNTH_H_
