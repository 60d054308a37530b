#ifndef PGRID_POLELOSS_LOSS_H_
#define PGRID_POLELOSS_LOSS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "pgrid/geo/types.h"

namespace pgrid::poleloss {

// Channel order of probability maps and logits.
inline constexpr int kBackground = 0;
inline constexpr int kPole = 1;

struct LossConfig {
  double fg_threshold = 0.5;
  double lambda_hard_neg = 1.0;
  double epsilon = 1e-7;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static LossConfig FromJson(const nlohmann::json& j);
};

// Per-pixel two-class softmax of a 2-channel logits raster.
geo::DoubleRaster Softmax(const geo::DoubleRaster& logits);

// Maps dL/dS to dL/dZ through the per-pixel softmax, given S = Softmax(Z).
geo::DoubleRaster SoftmaxBackward(const geo::DoubleRaster& probs,
                                  const geo::DoubleRaster& grad_probs);

// A loss term and its gradient with respect to the probability map (2
// channels, same grid as S).
struct Term {
  double loss = 0.0;
  geo::DoubleRaster grad;
};

// -log of the largest pole probability when the image has poles, otherwise
// -log of one minus it. Only the argmax pixel (first in row-major order)
// receives gradient.
Term ImageLevelLoss(const geo::DoubleRaster& probs, bool has_pole,
                    double epsilon = 1e-7);

// -sum of log S(pole) over the annotated pole pixels. Throws ValidationError
// naming the point id if a point lies outside the raster.
Term PointLevelLoss(const geo::DoubleRaster& probs,
                    std::span<const geo::PixelPoint> poles,
                    double epsilon = 1e-7);

struct SplitTerm : Term {
  // Union of the watershed ridges of all multi-pole blobs.
  geo::ByteRaster boundary;
};

// For each foreground blob holding n >= 2 pole points: watershed on 1 - S(pole)
// inside the blob, seeded at the points, and n * sum of -log S(background)
// over the ridge.
SplitTerm SplitLevelLoss(const geo::DoubleRaster& probs,
                         std::span<const geo::PixelPoint> poles,
                         double fg_threshold = 0.5, double epsilon = 1e-7);

// -sum of log S(background) over every pixel of foreground blobs that hold
// no pole point.
Term FalsePositiveLoss(const geo::DoubleRaster& probs,
                       std::span<const geo::PixelPoint> poles,
                       double fg_threshold = 0.5, double epsilon = 1e-7);

// lambda * -sum of log S(background) over the hard-negative pixels.
Term HardNegativeLoss(const geo::DoubleRaster& probs,
                      std::span<const geo::PixelPoint> negatives,
                      double lambda = 1.0, double epsilon = 1e-7);

// The discrete choices a loss evaluation made. Finite-difference checks skip
// coordinates whose perturbation changes any of them.
struct Structure {
  std::size_t argmax = 0;
  std::vector<std::uint8_t> foreground;
  std::vector<std::uint8_t> ridge;

  bool operator==(const Structure&) const = default;
};

struct LossBreakdown {
  double l_image = 0.0;
  double l_point = 0.0;
  double l_split = 0.0;
  double l_fp = 0.0;
  // Already multiplied by lambda_hard_neg.
  double l_hard_neg = 0.0;
  double total = 0.0;
  geo::DoubleRaster probs;
  geo::DoubleRaster grad_logits;
  Structure structure;
};

// Softmax, all five terms and the exact gradient of their sum with respect to
// the logits. The image has poles iff `poles` is nonempty.
LossBreakdown CompositeLoss(const geo::DoubleRaster& logits,
                            std::span<const geo::PixelPoint> poles,
                            std::span<const geo::PixelPoint> negatives,
                            const LossConfig& config = {});

}  // namespace pgrid::poleloss

#endif  // PGRID_POLELOSS_LOSS_H_
