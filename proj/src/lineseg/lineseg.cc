#include "pgrid/lineseg/lineseg.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgrid/poleloss/loss.h"
#include "pgrid/rasterops/buffer.h"
#include "pgrid/rasterops/resample.h"
#include "pgrid/scorer/augment.h"
#include "pgrid/scorer/features.h"
#include "pgrid/util/parallel.h"

namespace pgrid::lineseg {

using geo::ByteRaster;
using geo::DoubleRaster;
using geo::FloatRaster;

namespace {

int CeilDiv(int a, int b) { return (a + b - 1) / b; }

geo::AffineGeoref Coarsen(geo::AffineGeoref g, double factor) {
  g.px_w *= factor;
  g.rot_y *= factor;
  g.rot_x *= factor;
  g.px_h *= factor;
  return g;
}

void CheckSf(int sf) {
  if (sf < 1) throw ValidationError("scaling factor must be >= 1, got " + std::to_string(sf));
}

}  // namespace

PatchLabelGrid DownscaleLabels(const ByteRaster& mask, int sf) {
  CheckSf(sf);
  if (mask.channels() != 1) throw ShapeError("label mask must be single-channel");
  PatchLabelGrid out;
  out.sf = sf;
  out.source_width = mask.width();
  out.source_height = mask.height();
  out.grid = ByteRaster(CeilDiv(mask.width(), sf), CeilDiv(mask.height(), sf), 1,
                        Coarsen(mask.georef(), sf), 0);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask(c, r)) out.grid(c / sf, r / sf) = 1;
    }
  }
  return out;
}

FloatRaster PoolFeatures(const FloatRaster& features, int sf) {
  CheckSf(sf);
  const int pw = CeilDiv(features.width(), sf);
  const int ph = CeilDiv(features.height(), sf);
  FloatRaster out(pw, ph, features.channels(), Coarsen(features.georef(), sf), 0.0f);
  std::vector<double> acc(static_cast<std::size_t>(pw) * ph);
  std::vector<int> count(acc.size(), 0);
  for (int r = 0; r < features.height(); ++r) {
    for (int c = 0; c < features.width(); ++c) ++count[(r / sf) * pw + c / sf];
  }
  for (int ch = 0; ch < features.channels(); ++ch) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto in = features.plane(ch);
    for (int r = 0; r < features.height(); ++r) {
      for (int c = 0; c < features.width(); ++c) {
        acc[(r / sf) * pw + c / sf] += in[static_cast<std::size_t>(r) * features.width() + c];
      }
    }
    auto dst = out.plane(ch);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      dst[i] = static_cast<float>(acc[i] / count[i]);
    }
  }
  return out;
}

BceResult PatchBceLoss(const DoubleRaster& logits, const ByteRaster& labels,
                       double epsilon) {
  if (logits.channels() != 2 || labels.channels() != 1 ||
      logits.width() != labels.width() || logits.height() != labels.height()) {
    throw ShapeError("patch logits and labels have different shapes");
  }
  const DoubleRaster s = poleloss::Softmax(logits);
  BceResult out{0.0, DoubleRaster(logits.width(), logits.height(), 2, logits.georef(), 0.0)};
  const auto s0 = s.plane(poleloss::kBackground);
  const auto s1 = s.plane(poleloss::kPole);
  auto d0 = out.grad_logits.plane(poleloss::kBackground);
  auto d1 = out.grad_logits.plane(poleloss::kPole);
  const std::size_t n = s0.size();
  if (n == 0) return out;
  const double inv = 1.0 / static_cast<double>(n);
  const double lo = epsilon;
  const double hi = 1.0 - epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    const bool y = labels.data()[i] != 0;
    // Gradient with respect to the clamped probability of the true class,
    // then through the two-class softmax.
    const double p = y ? s1[i] : s0[i];
    out.loss -= std::log(std::clamp(p, lo, hi)) * inv;
    const double dp = (p > lo && p < hi) ? -inv / p : 0.0;
    const double dz_true = dp * s1[i] * s0[i];
    d1[i] = y ? dz_true : -dz_true;
    d0[i] = -d1[i];
  }
  return out;
}

poleloss::GradCheckReport CheckBceGradient(const DoubleRaster& logits,
                                           const ByteRaster& labels, double h) {
  const BceResult base = PatchBceLoss(logits, labels);
  DoubleRaster work = logits;
  return poleloss::CheckGradient(logits.data(), base.grad_logits.data(), h,
                                 [&](const std::vector<double>& x, bool*) {
                                   work.data() = x;
                                   return PatchBceLoss(work, labels).loss;
                                 });
}

FloatRaster UpsamplePredictions(const FloatRaster& patch_probs, int sf,
                                int out_width, int out_height) {
  CheckSf(sf);
  if (patch_probs.channels() != 1) throw ShapeError("patch map must be single-channel");
  if (patch_probs.width() != CeilDiv(out_width, sf) ||
      patch_probs.height() != CeilDiv(out_height, sf)) {
    throw ValidationError("patch grid " + std::to_string(patch_probs.width()) + "x" +
                          std::to_string(patch_probs.height()) +
                          " does not match the output size at sf " + std::to_string(sf));
  }
  FloatRaster out = rasterops::BilinearResample(patch_probs, out_width, out_height);
  out.set_georef(Coarsen(patch_probs.georef(), 1.0 / sf));
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

ByteRaster RasterizeTrainingLines(const geo::PolylineSet& lines,
                                  const geo::AffineGeoref& georef, int width,
                                  int height) {
  if (lines.lines.empty()) return ByteRaster(width, height, 1, georef, 0);
  return rasterops::BufferPolylines(lines, 0.5 * georef.PixelSize(), georef, width,
                                    height);
}

scorer::TrainResult TrainLines(const std::vector<LineSample>& dataset, int sf,
                               const scorer::TrainConfig& config, int jobs) {
  CheckSf(sf);
  if (dataset.empty()) throw ValidationError("training set is empty");
  const int channels = dataset.front().image.channels();
  std::vector<FloatRaster> pooled(dataset.size());
  std::vector<ByteRaster> labels(dataset.size());
  util::ParallelFor(dataset.size(), jobs, [&](std::size_t i) {
    const FloatRaster& img = dataset[i].image;
    if (img.channels() != channels) throw ShapeError("training images differ in channel count");
    pooled[i] = PoolFeatures(scorer::ExtractFeatures(img), sf);
    labels[i] = DownscaleLabels(
                    RasterizeTrainingLines(dataset[i].lines, img.georef(), img.width(),
                                           img.height()),
                    sf)
                    .grid;
  });
  const scorer::FeatureStats stats = scorer::ComputeFeatureStats(pooled);

  auto objective = [&](std::size_t i, const scorer::ScorerWeights& w,
                       const scorer::Augmentation* aug, scorer::WeightGrad* grad) {
    if (aug == nullptr || aug->IsIdentity()) {
      const BceResult b = PatchBceLoss(scorer::Score(pooled[i], w), labels[i]);
      *grad = scorer::BackpropLogits(pooled[i], b.grad_logits);
      return b.loss;
    }
    // Patches move like pixels, so the cached patch features and labels are
    // augmented directly.
    const FloatRaster f = scorer::AugmentFeatures(pooled[i], *aug);
    const ByteRaster y = scorer::TransformGeometry(labels[i], *aug);
    const BceResult b = PatchBceLoss(scorer::Score(f, w), y);
    *grad = scorer::BackpropLogits(f, b.grad_logits);
    return b.loss;
  };
  scorer::TrainResult r = scorer::TrainLinearHead(dataset.size(), channels, stats,
                                                  config, 0.0, jobs, objective);
  r.weights.metadata["task"] = "lines";
  r.weights.metadata["sf"] = sf;
  return r;
}

FloatRaster SegmentLines(const FloatRaster& image, const scorer::ScorerWeights& weights,
                         int sf) {
  const FloatRaster pooled = PoolFeatures(scorer::ExtractFeatures(image), sf);
  const DoubleRaster s = scorer::Predict(pooled, weights);
  FloatRaster patch(pooled.width(), pooled.height(), 1, pooled.georef(), 0.0f);
  const auto line = s.plane(poleloss::kPole);
  for (std::size_t i = 0; i < line.size(); ++i) patch.data()[i] = static_cast<float>(line[i]);
  FloatRaster out = UpsamplePredictions(patch, sf, image.width(), image.height());
  out.set_georef(image.georef());
  return out;
}

}  // namespace pgrid::lineseg
