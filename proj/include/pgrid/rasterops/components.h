#ifndef PGRID_RASTEROPS_COMPONENTS_H_
#define PGRID_RASTEROPS_COMPONENTS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pgrid/geo/types.h"

namespace pgrid::rasterops {

struct BlobStats {
  std::int64_t area = 0;
  int min_col = 0;
  int min_row = 0;
  int max_col = 0;
  int max_row = 0;
  // Number of annotations inside the blob; filled by CountAnnotations.
  int annotation_count = 0;
};

// Connected-component labelling. Label 0 is background; blobs are numbered
// 1..blob_count in row-major order of their first pixel. stats[k - 1]
// describes label k.
struct BlobLabels {
  geo::LabelRaster labels;
  int blob_count = 0;
  std::vector<BlobStats> stats;
};

// Labels the nonzero pixels of a single-channel mask. `connectivity` is 4 or
// 8.
BlobLabels ConnectedComponents(const geo::ByteRaster& mask,
                               int connectivity = 8);

// Sets annotation_count on each blob from the given pixel points. Points on
// background pixels are ignored.
void CountAnnotations(BlobLabels& blobs, std::span<const geo::PixelPoint> points);

// Binary mask of `plane` >= threshold, sharing the raster's georef.
geo::ByteRaster Threshold(const geo::FloatRaster& raster, int channel,
                          float threshold);

}  // namespace pgrid::rasterops

#endif  // PGRID_RASTEROPS_COMPONENTS_H_
