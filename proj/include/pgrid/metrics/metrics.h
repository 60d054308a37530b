#ifndef PGRID_METRICS_METRICS_H_
#define PGRID_METRICS_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgrid/geo/types.h"

namespace pgrid::metrics {

enum class MatchVariant { kStrict, kAll };

std::string ToString(MatchVariant v);
MatchVariant ParseMatchVariant(const std::string& s);

// Distance thresholds (meters) reported by default.
inline constexpr double kDefaultThresholds[] = {5.0, 7.0, 10.0};
inline constexpr double kDefaultDmapThreshold = 10.0;
inline constexpr double kDefaultLineBuffer = 2.0;

struct MatchPair {
  std::int64_t gt_id = 0;
  std::int64_t pred_id = 0;
  double distance = 0.0;
};

struct MatchResult {
  double th = 0.0;
  MatchVariant variant = MatchVariant::kStrict;
  std::vector<MatchPair> pairs;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Ground-truth points with at least one accepted prediction.
  std::size_t gt_detected = 0;
};

// One-to-one matching: candidate pairs within th, sorted by (distance, gt id,
// pred id), accepted greedily while both ends are free. Hard negatives in
// either set are ignored. Throws ValidationError if th <= 0.
MatchResult MatchStrict(const geo::PointAnnotations& gt,
                        const geo::PointAnnotations& pred, double th);

// Many-to-one matching: every prediction within th of some ground-truth
// point is a true positive, paired with its nearest one (ties by gt id).
MatchResult MatchAll(const geo::PointAnnotations& gt,
                     const geo::PointAnnotations& pred, double th);

MatchResult Match(const geo::PointAnnotations& gt,
                  const geo::PointAnnotations& pred, double th,
                  MatchVariant variant);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 is taken as 0 everywhere.
Prf ComputePrf(std::size_t tp, std::size_t fp, std::size_t fn);
double HarmonicMean(double p, double r);

// Average precision over the confidence-ranked predictions with all-point
// interpolation. Throws ValidationError if a prediction has no confidence.
double AveragePrecision(const geo::PointAnnotations& gt,
                        const geo::PointAnnotations& pred, double th,
                        MatchVariant variant = MatchVariant::kStrict);

// Unweighted mean; 0 for an empty list.
double MeanAveragePrecision(std::span<const double> aps);

struct LineMetrics {
  double miou = 0.0;
  double line_iou = 0.0;
  double background_iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Confusion-matrix metrics of a binary prediction against ground truth
// rasterized on the same grid.
LineMetrics MaskMetrics(const geo::ByteRaster& pred, const geo::ByteRaster& gt);

// The ground truth is the buffer_m corridor around `gt` on the grid of
// `pred`. Throws ShapeError if the CRSs differ or no ground-truth vertex
// falls within the raster extent.
LineMetrics PixelLineMetrics(const geo::ByteRaster& pred,
                             const geo::PolylineSet& gt,
                             double buffer_m = kDefaultLineBuffer);

struct ThresholdRow {
  double th = 0.0;
  double p_s = 0.0;
  double p_a = 0.0;
  // Taken from strict matching.
  double r = 0.0;
  double f1_s = 0.0;
  double f1_a = 0.0;
};

ThresholdRow EvaluatePoles(const geo::PointAnnotations& gt,
                           const geo::PointAnnotations& pred, double th);

struct RegionReport {
  std::string region;
  std::vector<ThresholdRow> thresholds;
  std::optional<LineMetrics> lines;
  std::optional<double> dmap;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json ToJson(const RegionReport& report);
RegionReport ReportFromJson(const nlohmann::json& j);
// Header plus one row per (region, threshold); missing values are empty.
std::string ToCsv(std::span<const RegionReport> reports);

}  // namespace pgrid::metrics

#endif  // PGRID_METRICS_METRICS_H_
