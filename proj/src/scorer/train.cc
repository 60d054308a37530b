#include "pgrid/scorer/train.h"

#include <cmath>
#include <random>

#include "pgrid/scorer/features.h"
#include "pgrid/util/parallel.h"

namespace pgrid::scorer {

namespace {

// Raw-space weights equivalent to standardized-space parameters.
ScorerWeights Fold(const ScorerWeights& std_w, const FeatureStats& st) {
  ScorerWeights raw = std_w;
  for (int k = 0; k < 2; ++k) {
    double shift = 0.0;
    for (int f = 0; f < std_w.num_features; ++f) {
      raw.W(f, k) = std_w.W(f, k) / st.scale[f];
      shift += std_w.W(f, k) * st.mean[f] / st.scale[f];
    }
    raw.b[k] = std_w.b[k] - shift;
  }
  return raw;
}

bool Finite(const WeightGrad& g) {
  for (double v : g.w) {
    if (!std::isfinite(v)) return false;
  }
  return std::isfinite(g.b[0]) && std::isfinite(g.b[1]);
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("lr must be >= 0");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ValidationError("momentum must lie in [0, 1)");
  }
  if (!(lambda_hard_neg >= 0.0) || !std::isfinite(lambda_hard_neg)) {
    throw ValidationError("lambda_hard_neg must be >= 0");
  }
  if (!(max_grad_norm >= 0.0) || !std::isfinite(max_grad_norm)) {
    throw ValidationError("max_grad_norm must be >= 0");
  }
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"lr", lr},           {"epochs", epochs},
          {"momentum", momentum}, {"seed", seed},
          {"augment", augment}, {"lambda_hard_neg", lambda_hard_neg},
          {"max_grad_norm", max_grad_norm}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("training config must be an object");
  TrainConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "lr") {
        c.lr = value.get<double>();
      } else if (key == "epochs") {
        c.epochs = value.get<int>();
      } else if (key == "momentum") {
        c.momentum = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "augment") {
        c.augment = value.get<bool>();
      } else if (key == "lambda_hard_neg") {
        c.lambda_hard_neg = value.get<double>();
      } else if (key == "max_grad_norm") {
        c.max_grad_norm = value.get<double>();
      } else {
        throw ValidationError("unknown training config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed training config: ") + e.what());
  }
  c.Validate();
  return c;
}

FeatureStats ComputeFeatureStats(const std::vector<geo::FloatRaster>& features) {
  FeatureStats st;
  if (features.empty()) return st;
  const int nf = features.front().channels();
  st.mean.assign(nf, 0.0);
  st.scale.assign(nf, 1.0);
  for (int f = 0; f < nf; ++f) {
    double n = 0.0, sum = 0.0;
    for (const auto& r : features) {
      for (float v : r.plane(f)) sum += v;
      n += static_cast<double>(r.plane_size());
    }
    const double mean = n > 0 ? sum / n : 0.0;
    double ss = 0.0;
    for (const auto& r : features) {
      for (float v : r.plane(f)) ss += (v - mean) * (v - mean);
    }
    const double sd = n > 0 ? std::sqrt(ss / n) : 0.0;
    st.mean[f] = mean;
    st.scale[f] = sd < 1e-6 ? 1.0 : sd;
  }
  return st;
}

TrainResult TrainLinearHead(std::size_t num_samples, int image_channels,
                            const FeatureStats& stats, const TrainConfig& config,
                            double initial_positive_bias, int jobs,
                            const SampleObjective& objective) {
  config.Validate();
  if (num_samples == 0) throw ValidationError("training set is empty");
  const int nf = static_cast<int>(stats.mean.size());
  ScorerWeights params = ScorerWeights::Zeros(nf);
  params.b[1] = initial_positive_bias;
  std::vector<double> velocity(2 * nf + 2, 0.0);

  TrainResult result;
  std::vector<double> losses(num_samples);
  std::vector<WeightGrad> grads(num_samples);
  std::vector<std::uint8_t> failed(num_samples);
  int epoch = 0;
  for (; epoch < config.epochs; ++epoch) {
    const ScorerWeights raw = Fold(params, stats);
    util::ParallelFor(num_samples, jobs, [&](std::size_t i) {
      Augmentation aug;
      if (config.augment) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                          static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(epoch),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        aug = SampleAugmentation(rng, image_channels);
      }
      losses[i] = objective(i, raw, config.augment ? &aug : nullptr, &grads[i]);
      failed[i] = !std::isfinite(losses[i]) || !Finite(grads[i]);
    });

    double mean_loss = 0.0;
    WeightGrad g;
    g.w.assign(2 * static_cast<std::size_t>(nf), 0.0);
    bool bad = false;
    for (std::size_t i = 0; i < num_samples; ++i) {
      bad = bad || failed[i];
      mean_loss += losses[i];
      for (std::size_t k = 0; k < g.w.size(); ++k) g.w[k] += grads[i].w[k];
      g.b[0] += grads[i].b[0];
      g.b[1] += grads[i].b[1];
    }
    if (bad) {
      result.diverged = true;
      break;
    }
    const double inv = 1.0 / static_cast<double>(num_samples);
    mean_loss *= inv;
    result.loss_curve.push_back(mean_loss);

    // Chain rule from raw-space to standardized-space parameters.
    std::vector<double> d(2 * nf + 2);
    for (int k = 0; k < 2; ++k) {
      const double gb = g.b[k] * inv;
      for (int f = 0; f < nf; ++f) {
        d[2 * f + k] = (g.w[2 * f + k] * inv - gb * stats.mean[f]) / stats.scale[f];
      }
      d[2 * nf + k] = gb;
    }
    if (config.max_grad_norm > 0.0) {
      double norm = 0.0;
      for (double v : d) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > config.max_grad_norm) {
        for (double& v : d) v *= config.max_grad_norm / norm;
      }
    }
    for (std::size_t k = 0; k < d.size(); ++k) {
      velocity[k] = config.momentum * velocity[k] - config.lr * d[k];
    }
    for (int k = 0; k < 2; ++k) {
      for (int f = 0; f < nf; ++f) params.W(f, k) += velocity[2 * f + k];
      params.b[k] += velocity[2 * nf + k];
    }
  }

  result.weights = Fold(params, stats);
  result.weights.metadata = {
      {"iterations", epoch},
      {"final_loss", result.loss_curve.empty() ? nullptr
                                               : nlohmann::json(result.loss_curve.back())},
      {"seed", config.seed},
      {"diverged", result.diverged},
      {"config", config.ToJson()}};
  return result;
}

TrainResult TrainPoles(const std::vector<PoleSample>& dataset,
                       const TrainConfig& config,
                       poleloss::LossConfig loss_config, int jobs) {
  if (dataset.empty()) throw ValidationError("training set is empty");
  loss_config.lambda_hard_neg = config.lambda_hard_neg;
  loss_config.Validate();
  const int channels = dataset.front().image.channels();
  std::vector<geo::FloatRaster> features(dataset.size());
  util::ParallelFor(dataset.size(), jobs, [&](std::size_t i) {
    if (dataset[i].image.channels() != channels) {
      throw ShapeError("training images differ in channel count");
    }
    features[i] = ExtractFeatures(dataset[i].image);
  });
  const FeatureStats stats = ComputeFeatureStats(features);

  auto objective = [&](std::size_t i, const ScorerWeights& w,
                       const Augmentation* aug, WeightGrad* grad) {
    const PoleSample& s = dataset[i];
    const int width = s.image.width();
    const int height = s.image.height();
    if (aug == nullptr || aug->IsIdentity()) {
      const auto b = poleloss::CompositeLoss(Score(features[i], w), s.poles,
                                             s.negatives, loss_config);
      *grad = BackpropLogits(features[i], b.grad_logits);
      return b.total;
    }
    const geo::FloatRaster f = AugmentFeatures(features[i], *aug);
    std::vector<geo::PixelPoint> poles, negatives;
    for (const auto& p : s.poles) poles.push_back(TransformPoint(p, *aug, width, height));
    for (const auto& p : s.negatives) {
      negatives.push_back(TransformPoint(p, *aug, width, height));
    }
    const auto b =
        poleloss::CompositeLoss(Score(f, w), poles, negatives, loss_config);
    *grad = BackpropLogits(f, b.grad_logits);
    return b.total;
  };
  TrainResult r = TrainLinearHead(dataset.size(), channels, stats, config,
                                  kInitialPoleBias, jobs, objective);
  r.weights.metadata["task"] = "poles";
  r.weights.metadata["loss_config"] = loss_config.ToJson();
  return r;
}

geo::DoubleRaster DetectPoles(const geo::FloatRaster& image,
                              const ScorerWeights& weights) {
  return Predict(ExtractFeatures(image), weights);
}

poleloss::GradCheckReport GradCheck(const ScorerWeights& weights,
                                    const PoleSample& sample,
                                    const poleloss::LossConfig& loss_config,
                                    double h) {
  if (!(h >= 1e-6 && h <= 1e-3)) {
    throw ValidationError("gradcheck step h must lie in [1e-6, 1e-3]");
  }
  weights.Validate();
  const geo::FloatRaster features = ExtractFeatures(sample.image);
  const auto base = poleloss::CompositeLoss(Score(features, weights),
                                            sample.poles, sample.negatives,
                                            loss_config);
  const WeightGrad g = BackpropLogits(features, base.grad_logits);
  std::vector<double> x = weights.w;
  x.push_back(weights.b[0]);
  x.push_back(weights.b[1]);
  std::vector<double> analytic = g.w;
  analytic.push_back(g.b[0]);
  analytic.push_back(g.b[1]);
  ScorerWeights work = weights;
  return poleloss::CheckGradient(
      x, analytic, h, [&](const std::vector<double>& p, bool* stable) {
        std::copy(p.begin(), p.end() - 2, work.w.begin());
        work.b = {p[p.size() - 2], p[p.size() - 1]};
        const auto b = poleloss::CompositeLoss(
            Score(features, work), sample.poles, sample.negatives, loss_config);
        *stable = b.structure == base.structure;
        return b.total;
      });
}

}  // namespace pgrid::scorer
