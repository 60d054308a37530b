#ifndef PGRID_LINESEG_LINESEG_H_
#define PGRID_LINESEG_LINESEG_H_

#include <vector>

#include "pgrid/geo/types.h"
#include "pgrid/poleloss/gradcheck.h"
#include "pgrid/scorer/model.h"
#include "pgrid/scorer/train.h"

namespace pgrid::lineseg {

// Scaling factor used by default; 4 gave the best localization in the
// reference experiments, 1 and 8 are the other values studied.
inline constexpr int kDefaultScalingFactor = 4;

struct PatchLabelGrid {
  int sf = 1;
  // ceil(W / sf) x ceil(H / sf); the georef has pixels sf times larger.
  geo::ByteRaster grid;
  int source_width = 0;
  int source_height = 0;
};

// A patch is 1 iff any source pixel inside it is nonzero. Edge patches may
// cover fewer than sf x sf pixels. Throws ValidationError if sf < 1.
PatchLabelGrid DownscaleLabels(const geo::ByteRaster& mask, int sf);

// Mean of each channel over every sf x sf patch (over the pixels present for
// partial edge patches).
geo::FloatRaster PoolFeatures(const geo::FloatRaster& features, int sf);

struct BceResult {
  double loss = 0.0;
  geo::DoubleRaster grad_logits;
};

// Mean over patches of -[y log p + (1 - y) log(1 - p)] with p the line
// channel of the per-patch softmax of `logits` (2 channels) and each
// probability clamped to [epsilon, 1 - epsilon]. The gradient is with
// respect to the logits. Throws ShapeError if the grids differ.
BceResult PatchBceLoss(const geo::DoubleRaster& logits,
                       const geo::ByteRaster& labels, double epsilon = 1e-7);

// Central finite differences of PatchBceLoss over every logit.
poleloss::GradCheckReport CheckBceGradient(const geo::DoubleRaster& logits,
                                           const geo::ByteRaster& labels, double h = 1e-4);

// Bilinear upsampling (align-corners-false, patch values taken as patch-centre
// samples) of a single-channel patch map to out_width x out_height. Throws
// ValidationError unless the patch grid is ceil(out / sf) in each dimension.
geo::FloatRaster UpsamplePredictions(const geo::FloatRaster& patch_probs,
                                     int sf, int out_width, int out_height);

// Training rasterization of line labels: pixels whose centre lies within half
// a pixel of a line, i.e. one-pixel strokes without any buffer.
geo::ByteRaster RasterizeTrainingLines(const geo::PolylineSet& lines,
                                       const geo::AffineGeoref& georef,
                                       int width, int height);

struct LineSample {
  geo::FloatRaster image;
  geo::PolylineSet lines;
};

// Trains the pooled-patch line scorer on PatchBceLoss with the same
// optimizer, augmentations and determinism guarantees as the pole trainer.
scorer::TrainResult TrainLines(const std::vector<LineSample>& dataset, int sf,
                               const scorer::TrainConfig& config, int jobs = 1);

// Full-resolution line probability for an image.
geo::FloatRaster SegmentLines(const geo::FloatRaster& image,
                              const scorer::ScorerWeights& weights, int sf);

}  // namespace pgrid::lineseg

#endif  // PGRID_LINESEG_LINESEG_H_
