#ifndef PGRID_SCORER_TRAIN_H_
#define PGRID_SCORER_TRAIN_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"
#include "pgrid/poleloss/gradcheck.h"
#include "pgrid/poleloss/loss.h"
#include "pgrid/scorer/augment.h"
#include "pgrid/scorer/model.h"

namespace pgrid::scorer {

// max_grad_norm > 0 rescales any step whose gradient norm (in standardized
// parameter space) exceeds it; 0 leaves gradients untouched.
struct TrainConfig {
  double lr = 1e-2;
  int epochs = 60;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  bool augment = true;
  double lambda_hard_neg = 1.0;
  double max_grad_norm = 1.0;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static TrainConfig FromJson(const nlohmann::json& j);
};

struct TrainResult {
  ScorerWeights weights;
  // Mean loss over the dataset at the start of each completed epoch.
  std::vector<double> loss_curve;
  // True if training stopped early on a non-finite loss or gradient; the
  // weights are then the last finite ones.
  bool diverged = false;
};

// Per-feature affine standardization used during training.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> scale;
};

// Pixel-weighted mean and standard deviation of every feature channel over
// the rasters; a scale below 1e-6 is replaced by 1.
FeatureStats ComputeFeatureStats(const std::vector<geo::FloatRaster>& features);

// Loss and raw-space weight gradient for sample `index` under `weights`,
// with `aug` to apply (nullptr = none).
using SampleObjective = std::function<double(
    std::size_t index, const ScorerWeights& weights, const Augmentation* aug,
    WeightGrad* grad)>;

// Full-batch gradient descent, with optional momentum, on the mean of the
// per-sample objectives. Parameters live in standardized feature space and
// are folded back to raw-feature weights on output. Per-sample work runs on
// `jobs` threads and is reduced in sample order, so the result does not
// depend on `jobs`. Augmentations are drawn from an RNG seeded by
// (seed, epoch, sample).
TrainResult TrainLinearHead(std::size_t num_samples, int image_channels,
                            const FeatureStats& stats, const TrainConfig& config,
                            double initial_positive_bias, int jobs,
                            const SampleObjective& objective);

struct PoleSample {
  geo::FloatRaster image;
  std::vector<geo::PixelPoint> poles;
  std::vector<geo::PixelPoint> negatives;
};

// Initial pole bias: S(pole) starts near 0.12 everywhere, so the first
// thresholded map is empty instead of one image-sized blob.
inline constexpr double kInitialPoleBias = -2.0;

// Trains the pole scorer on the composite loss. `loss_config.lambda_hard_neg`
// is overridden by the training config.
TrainResult TrainPoles(const std::vector<PoleSample>& dataset,
                       const TrainConfig& config,
                       poleloss::LossConfig loss_config = {}, int jobs = 1);

// Pole probability map for an image.
geo::DoubleRaster DetectPoles(const geo::FloatRaster& image,
                              const ScorerWeights& weights);

// Central finite differences of the composite loss with respect to every
// weight and bias. Throws ValidationError unless h lies in [1e-6, 1e-3].
poleloss::GradCheckReport GradCheck(const ScorerWeights& weights,
                                    const PoleSample& sample,
                                    const poleloss::LossConfig& loss_config,
                                    double h);

}  // namespace pgrid::scorer

#endif  // PGRID_SCORER_TRAIN_H_
