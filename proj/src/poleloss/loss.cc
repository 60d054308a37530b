#include "pgrid/poleloss/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgrid/rasterops/components.h"
#include "pgrid/rasterops/watershed.h"

namespace pgrid::poleloss {

using geo::ByteRaster;
using geo::DoubleRaster;
using geo::PixelPoint;

namespace {

void CheckProbs(const DoubleRaster& probs) {
  if (probs.channels() != 2) {
    throw ShapeError("probability map must have 2 channels, got " +
                     std::to_string(probs.channels()));
  }
}

DoubleRaster ZeroGrad(const DoubleRaster& probs) {
  return DoubleRaster(probs.width(), probs.height(), 2, probs.georef(), 0.0);
}

// -log(clamp(p)) and its derivative; the derivative is 0 where the clamp is
// active.
double NegLog(double p, double eps, double* grad) {
  const double q = std::clamp(p, eps, 1.0 - eps);
  *grad = (p > eps && p < 1.0 - eps) ? -1.0 / p : 0.0;
  return -std::log(q);
}

void CheckInside(const DoubleRaster& probs, std::span<const PixelPoint> pts) {
  for (const auto& p : pts) {
    if (!probs.Contains(p.col, p.row)) {
      throw ValidationError("point " + std::to_string(p.id) +
                            " lies outside the " +
                            std::to_string(probs.width()) + "x" +
                            std::to_string(probs.height()) + " raster");
    }
  }
}

ByteRaster Foreground(const DoubleRaster& probs, double threshold) {
  ByteRaster fg(probs.width(), probs.height(), 1, probs.georef(), 0);
  const auto pole = probs.plane(kPole);
  for (std::size_t i = 0; i < pole.size(); ++i) {
    fg.data()[i] = pole[i] >= threshold;
  }
  return fg;
}

rasterops::BlobLabels PoleBlobs(const DoubleRaster& probs,
                                std::span<const PixelPoint> poles,
                                double threshold) {
  auto blobs = rasterops::ConnectedComponents(Foreground(probs, threshold), 8);
  rasterops::CountAnnotations(blobs, poles);
  return blobs;
}

}  // namespace

void LossConfig::Validate() const {
  if (!(fg_threshold > 0.0 && fg_threshold < 1.0)) {
    throw ValidationError("fg_threshold must lie in (0, 1)");
  }
  if (!(lambda_hard_neg >= 0.0) || !std::isfinite(lambda_hard_neg)) {
    throw ValidationError("lambda_hard_neg must be finite and >= 0");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ValidationError("epsilon must lie in (0, 0.5)");
  }
}

nlohmann::json LossConfig::ToJson() const {
  return {{"fg_threshold", fg_threshold},
          {"lambda_hard_neg", lambda_hard_neg},
          {"epsilon", epsilon}};
}

LossConfig LossConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("loss config must be an object");
  LossConfig c;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw ValidationError("loss config key '" + key + "' must be a number");
    }
    if (key == "fg_threshold") {
      c.fg_threshold = value.get<double>();
    } else if (key == "lambda_hard_neg") {
      c.lambda_hard_neg = value.get<double>();
    } else if (key == "epsilon") {
      c.epsilon = value.get<double>();
    } else {
      throw ValidationError("unknown loss config key '" + key + "'");
    }
  }
  c.Validate();
  return c;
}

DoubleRaster Softmax(const DoubleRaster& logits) {
  if (logits.channels() != 2) {
    throw ShapeError("logits must have 2 channels, got " +
                     std::to_string(logits.channels()));
  }
  DoubleRaster s(logits.width(), logits.height(), 2, logits.georef(), 0.0);
  const auto z0 = logits.plane(kBackground);
  const auto z1 = logits.plane(kPole);
  auto s0 = s.plane(kBackground);
  auto s1 = s.plane(kPole);
  for (std::size_t i = 0; i < z0.size(); ++i) {
    // Each side from its own logistic keeps both tails accurate.
    s1[i] = 1.0 / (1.0 + std::exp(z0[i] - z1[i]));
    s0[i] = 1.0 / (1.0 + std::exp(z1[i] - z0[i]));
  }
  return s;
}

DoubleRaster SoftmaxBackward(const DoubleRaster& probs,
                             const DoubleRaster& grad_probs) {
  CheckProbs(probs);
  if (!probs.SameGrid(grad_probs) || grad_probs.channels() != 2) {
    throw ShapeError("gradient and probability map shapes differ");
  }
  DoubleRaster dz = ZeroGrad(probs);
  const auto s0 = probs.plane(kBackground);
  const auto s1 = probs.plane(kPole);
  const auto g0 = grad_probs.plane(kBackground);
  const auto g1 = grad_probs.plane(kPole);
  auto d0 = dz.plane(kBackground);
  auto d1 = dz.plane(kPole);
  for (std::size_t i = 0; i < s0.size(); ++i) {
    const double v = (g1[i] - g0[i]) * s1[i] * s0[i];
    d1[i] = v;
    d0[i] = -v;
  }
  return dz;
}

Term ImageLevelLoss(const DoubleRaster& probs, bool has_pole, double epsilon) {
  CheckProbs(probs);
  Term t{0.0, ZeroGrad(probs)};
  const auto pole = probs.plane(kPole);
  if (pole.empty()) return t;
  const std::size_t arg =
      std::max_element(pole.begin(), pole.end()) - pole.begin();
  double g = 0.0;
  if (has_pole) {
    t.loss = NegLog(pole[arg], epsilon, &g);
    t.grad.plane(kPole)[arg] = g;
  } else {
    // 1 - max S(pole) is the background probability at the argmax.
    t.loss = NegLog(probs.plane(kBackground)[arg], epsilon, &g);
    t.grad.plane(kBackground)[arg] = g;
  }
  return t;
}

Term PointLevelLoss(const DoubleRaster& probs, std::span<const PixelPoint> poles,
                    double epsilon) {
  CheckProbs(probs);
  CheckInside(probs, poles);
  Term t{0.0, ZeroGrad(probs)};
  for (const auto& p : poles) {
    double g = 0.0;
    t.loss += NegLog(probs(p.col, p.row, kPole), epsilon, &g);
    t.grad(p.col, p.row, kPole) += g;
  }
  return t;
}

SplitTerm SplitLevelLoss(const DoubleRaster& probs,
                         std::span<const PixelPoint> poles, double fg_threshold,
                         double epsilon) {
  CheckProbs(probs);
  CheckInside(probs, poles);
  SplitTerm t;
  t.grad = ZeroGrad(probs);
  t.boundary = ByteRaster(probs.width(), probs.height(), 1, probs.georef(), 0);
  const auto blobs = PoleBlobs(probs, poles, fg_threshold);

  std::vector<std::vector<PixelPoint>> seeds(blobs.blob_count + 1);
  for (const auto& p : poles) {
    const int label = blobs.labels(p.col, p.row);
    if (label == 0) continue;
    auto& s = seeds[label];
    const bool dup = std::any_of(s.begin(), s.end(), [&](const PixelPoint& q) {
      return q.col == p.col && q.row == p.row;
    });
    if (!dup) s.push_back(p);
  }

  for (int label = 1; label <= blobs.blob_count; ++label) {
    const auto& st = blobs.stats[label - 1];
    if (st.annotation_count < 2 || seeds[label].size() < 2) continue;
    // Watershed on the blob's bounding box only.
    const int w = st.max_col - st.min_col + 1;
    const int h = st.max_row - st.min_row + 1;
    geo::FloatRaster topo(w, h, 1, {}, 1.0f);
    ByteRaster mask(w, h, 1, {}, 0);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int gc = c + st.min_col;
        const int gr = r + st.min_row;
        if (blobs.labels(gc, gr) != label) continue;
        mask(c, r) = 1;
        topo(c, r) = static_cast<float>(1.0 - probs(gc, gr, kPole));
      }
    }
    std::vector<PixelPoint> local = seeds[label];
    for (auto& p : local) {
      p.col -= st.min_col;
      p.row -= st.min_row;
    }
    const auto ws = rasterops::Watershed(topo, local, mask);
    const double weight = st.annotation_count;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (!ws.ridge(c, r)) continue;
        const int gc = c + st.min_col;
        const int gr = r + st.min_row;
        double g = 0.0;
        t.loss += weight * NegLog(probs(gc, gr, kBackground), epsilon, &g);
        t.grad(gc, gr, kBackground) += weight * g;
        t.boundary(gc, gr) = 1;
      }
    }
  }
  return t;
}

Term FalsePositiveLoss(const DoubleRaster& probs,
                       std::span<const PixelPoint> poles, double fg_threshold,
                       double epsilon) {
  CheckProbs(probs);
  CheckInside(probs, poles);
  Term t{0.0, ZeroGrad(probs)};
  const auto blobs = PoleBlobs(probs, poles, fg_threshold);
  const auto& labels = blobs.labels.data();
  const auto s0 = probs.plane(kBackground);
  auto g0 = t.grad.plane(kBackground);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label == 0 || blobs.stats[label - 1].annotation_count > 0) continue;
    double g = 0.0;
    t.loss += NegLog(s0[i], epsilon, &g);
    g0[i] += g;
  }
  return t;
}

Term HardNegativeLoss(const DoubleRaster& probs,
                      std::span<const PixelPoint> negatives, double lambda,
                      double epsilon) {
  CheckProbs(probs);
  CheckInside(probs, negatives);
  Term t{0.0, ZeroGrad(probs)};
  if (lambda == 0.0) return t;
  for (const auto& p : negatives) {
    double g = 0.0;
    t.loss += lambda * NegLog(probs(p.col, p.row, kBackground), epsilon, &g);
    t.grad(p.col, p.row, kBackground) += lambda * g;
  }
  return t;
}

LossBreakdown CompositeLoss(const DoubleRaster& logits,
                            std::span<const PixelPoint> poles,
                            std::span<const PixelPoint> negatives,
                            const LossConfig& config) {
  config.Validate();
  LossBreakdown out;
  out.probs = Softmax(logits);
  const DoubleRaster& s = out.probs;
  const double eps = config.epsilon;

  const Term image = ImageLevelLoss(s, !poles.empty(), eps);
  const Term point = PointLevelLoss(s, poles, eps);
  SplitTerm split = SplitLevelLoss(s, poles, config.fg_threshold, eps);
  const Term fp = FalsePositiveLoss(s, poles, config.fg_threshold, eps);
  const Term hn = HardNegativeLoss(s, negatives, config.lambda_hard_neg, eps);

  out.l_image = image.loss;
  out.l_point = point.loss;
  out.l_split = split.loss;
  out.l_fp = fp.loss;
  out.l_hard_neg = hn.loss;
  out.total = out.l_image + out.l_point + out.l_split + out.l_fp + out.l_hard_neg;

  DoubleRaster grad_s = ZeroGrad(s);
  auto& g = grad_s.data();
  for (const Term* term : {&image, &point, static_cast<const Term*>(&split), &fp, &hn}) {
    const auto& tg = term->grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += tg[i];
  }
  out.grad_logits = SoftmaxBackward(s, grad_s);

  const auto pole = s.plane(kPole);
  if (!pole.empty()) {
    out.structure.argmax =
        std::max_element(pole.begin(), pole.end()) - pole.begin();
  }
  out.structure.foreground = Foreground(s, config.fg_threshold).data();
  out.structure.ridge = std::move(split.boundary.data());
  return out;
}

}  // namespace pgrid::poleloss
