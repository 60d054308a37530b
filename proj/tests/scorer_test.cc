#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pgrid/scorer/augment.h"
#include "pgrid/scorer/features.h"
#include "pgrid/scorer/model.h"
#include "pgrid/scorer/train.h"

namespace pgrid::scorer {
namespace {

using geo::FloatRaster;
using geo::PixelPoint;

FloatRaster NoiseImage(std::mt19937& rng, int w, int h, int channels) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  FloatRaster img(w, h, channels, {}, 0.0f);
  for (auto& v : img.data()) v = u(rng);
  return img;
}

TEST(FeaturesTest, ConstantImage) {
  FloatRaster img(20, 13, 2, {}, 0.37f);
  const FloatRaster f = ExtractFeatures(img);
  ASSERT_EQ(f.channels(), 12);
  for (int ch = 0; ch < 2; ++ch) {
    for (int k = 0; k < 4; ++k) {
      for (float v : f.plane(6 * ch + k)) EXPECT_NEAR(v, 0.37f, 1e-6);
    }
    for (int k = 4; k < 6; ++k) {
      for (float v : f.plane(6 * ch + k)) EXPECT_NEAR(v, 0.0f, 1e-6);
    }
  }
}

TEST(FeaturesTest, GaussianChannelsMatchKernelFormula) {
  const int n = 41, cx = 20, cy = 20;
  FloatRaster img(n, n, 1, {}, 0.0f);
  img(cx, cy) = 1.0f;
  const FloatRaster f = ExtractFeatures(img);
  const double sigmas[3] = {1.0, 2.0, 4.0};
  for (int s = 0; s < 3; ++s) {
    const double sigma = sigmas[s];
    const int radius = static_cast<int>(std::ceil(3 * sigma));
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) norm += std::exp(-i * i / (2 * sigma * sigma));
    for (int dy = -radius - 1; dy <= radius + 1; ++dy) {
      for (int dx = -radius - 1; dx <= radius + 1; ++dx) {
        double want = 0.0;
        if (std::abs(dx) <= radius && std::abs(dy) <= radius) {
          want = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) / (norm * norm);
        }
        EXPECT_NEAR(f(cx + dx, cy + dy, 1 + s), want, 1e-7) << sigma;
      }
    }
  }
}

TEST(FeaturesTest, SobelAndStdOnStep) {
  FloatRaster img(10, 10, 1, {}, 0.0f);
  for (int r = 0; r < 10; ++r) {
    for (int c = 5; c < 10; ++c) img(c, r) = 1.0f;
  }
  const FloatRaster f = ExtractFeatures(img);
  // Horizontal Sobel across a unit step: (1 + 2 + 1) / 8.
  EXPECT_NEAR(f(4, 5, 4), 0.5, 1e-6);
  EXPECT_NEAR(f(5, 5, 4), 0.5, 1e-6);
  EXPECT_NEAR(f(1, 5, 4), 0.0, 1e-6);
  // 5x5 window at column 4 holds 10 ones out of 25.
  EXPECT_NEAR(f(4, 5, 5), std::sqrt(0.4 * 0.6), 1e-6);
}

TEST(FeaturesTest, CountIndependentOfSize) {
  std::mt19937 rng(1);
  for (auto [w, h] : {std::pair{1, 1}, {3, 7}, {32, 17}}) {
    EXPECT_EQ(ExtractFeatures(NoiseImage(rng, w, h, 3)).channels(), 18);
  }
}

TEST(ScoreTest, ZeroWeightsGiveUniform) {
  std::mt19937 rng(2);
  const FloatRaster f = ExtractFeatures(NoiseImage(rng, 8, 8, 3));
  const auto s = Predict(f, ScorerWeights::Zeros(18));
  for (double v : s.data()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(ScoreTest, LargePoleBiasSaturates) {
  std::mt19937 rng(3);
  const FloatRaster f = ExtractFeatures(NoiseImage(rng, 8, 8, 3));
  ScorerWeights w = ScorerWeights::Zeros(18);
  w.b = {0.0, 10.0};
  const auto s = Predict(f, w);
  for (double v : s.plane(1)) EXPECT_NEAR(v, 1.0, 1e-4);
}

TEST(ScoreTest, MatchesDotProductOracle) {
  std::mt19937 rng(4);
  std::normal_distribution<double> n(0, 1);
  const FloatRaster f = ExtractFeatures(NoiseImage(rng, 8, 8, 3));
  ScorerWeights w = ScorerWeights::Zeros(18);
  for (double& v : w.w) v = n(rng);
  w.b = {n(rng), n(rng)};
  const auto z = Score(f, w);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      for (int k = 0; k < 2; ++k) {
        double want = w.b[k];
        for (int j = 0; j < 18; ++j) want += w.w[2 * j + k] * f(c, r, j);
        EXPECT_NEAR(z(c, r, k), want, 1e-9);
      }
    }
  }
  EXPECT_THROW(Score(f, ScorerWeights::Zeros(6)), ShapeError);
}

TEST(WeightsTest, JsonRoundTripIsBitExact) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0, 1e3);
  ScorerWeights w = ScorerWeights::Zeros(18);
  for (double& v : w.w) v = n(rng) * 1e-7;
  w.b = {n(rng), std::nextafter(1.0, 2.0)};
  w.metadata = {{"seed", 7}};
  const std::string text = w.ToJson().dump();
  EXPECT_EQ(ScorerWeights::FromJson(nlohmann::json::parse(text)), w);
}

TEST(WeightsTest, RejectsBadShapes) {
  nlohmann::json j = ScorerWeights::Zeros(2).ToJson();
  j["W"][0] = {1.0};
  EXPECT_THROW(ScorerWeights::FromJson(j), ValidationError);
  j = ScorerWeights::Zeros(2).ToJson();
  j["feature_bank_version"] = 99;
  EXPECT_THROW(ScorerWeights::FromJson(j), ValidationError);
}

std::vector<Augmentation> AllGeometries() {
  std::vector<Augmentation> out;
  for (int fh = 0; fh < 2; ++fh) {
    for (int fv = 0; fv < 2; ++fv) {
      for (int rot = 0; rot < 4; ++rot) {
        out.push_back({fh == 1, fv == 1, rot, {0.93, 1.0, 1.08}});
      }
    }
  }
  return out;
}

TEST(AugmentTest, FeaturesCommuteWithAugmentation) {
  std::mt19937 rng(6);
  const FloatRaster img = NoiseImage(rng, 23, 15, 3);
  const FloatRaster f = ExtractFeatures(img);
  for (const auto& a : AllGeometries()) {
    const FloatRaster direct = ExtractFeatures(AugmentImage(img, a));
    const FloatRaster cached = AugmentFeatures(f, a);
    ASSERT_EQ(direct.width(), cached.width());
    ASSERT_EQ(direct.height(), cached.height());
    for (std::size_t i = 0; i < direct.data().size(); ++i) {
      ASSERT_NEAR(direct.data()[i], cached.data()[i], 2e-6)
          << a.flip_h << a.flip_v << a.rot90;
    }
  }
}

TEST(AugmentTest, PointsFollowImageContent) {
  std::mt19937 rng(7);
  const FloatRaster img = NoiseImage(rng, 17, 9, 3);
  std::uniform_int_distribution<int> uc(0, 16), ur(0, 8);
  for (const auto& a : AllGeometries()) {
    const FloatRaster out = AugmentImage(img, a);
    for (int trial = 0; trial < 20; ++trial) {
      const PixelPoint p{trial, uc(rng), ur(rng)};
      const PixelPoint q = TransformPoint(p, a, 17, 9);
      for (int ch = 0; ch < 3; ++ch) {
        EXPECT_FLOAT_EQ(out(q.col, q.row, ch),
                        static_cast<float>(img(p.col, p.row, ch) * a.gains[ch]));
      }
    }
  }
}

// Bright discs at pole points and dark discs at distractors on textured
// background.
std::vector<PoleSample> ToyDataset(std::uint32_t seed, int n) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pos(4, 35);
  std::normal_distribution<float> noise(0.0f, 0.04f);
  std::vector<PoleSample> out;
  for (int s = 0; s < n; ++s) {
    PoleSample sample;
    sample.image = FloatRaster(40, 40, 3, {}, 0.0f);
    for (int ch = 0; ch < 3; ++ch) {
      for (float& v : sample.image.plane(ch)) v = 0.45f + noise(rng);
    }
    auto disc = [&](int cx, int cy, float v) {
      for (int r = cy - 2; r <= cy + 2; ++r) {
        for (int c = cx - 2; c <= cx + 2; ++c) {
          if ((c - cx) * (c - cx) + (r - cy) * (r - cy) <= 4) {
            for (int ch = 0; ch < 3; ++ch) sample.image(c, r, ch) = v + noise(rng);
          }
        }
      }
    };
    for (int k = 0; k < 2; ++k) {
      const int c = pos(rng), r = pos(rng);
      disc(c, r, 0.95f);
      sample.poles.push_back({k, c, r});
    }
    const int c = pos(rng), r = pos(rng);
    disc(c, r, 0.1f);
    sample.negatives.push_back({10, c, r});
    out.push_back(std::move(sample));
  }
  return out;
}

TEST(TrainPolesTest, ZeroLearningRateKeepsInitialWeights) {
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.epochs = 3;
  const auto r = TrainPoles(ToyDataset(1, 3), cfg);
  for (double v : r.weights.w) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.weights.b[0], 0.0);
  EXPECT_EQ(r.weights.b[1], kInitialPoleBias);
  EXPECT_EQ(r.loss_curve.size(), 3u);
}

TEST(TrainPolesTest, LossDecreasesForEverySeed) {
  const auto data = ToyDataset(2, 6);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.seed = seed;
    cfg.momentum = 0.5;
    const auto r = TrainPoles(data, cfg);
    ASSERT_FALSE(r.diverged);
    EXPECT_LT(r.loss_curve.back(), r.loss_curve.front()) << seed;
  }
}

TEST(TrainPolesTest, DeterministicAcrossRunsAndJobs) {
  const auto data = ToyDataset(3, 5);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 42;
  const auto a = TrainPoles(data, cfg, {}, 1);
  const auto b = TrainPoles(data, cfg, {}, 1);
  const auto c = TrainPoles(data, cfg, {}, 3);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.weights, c.weights);
  EXPECT_EQ(a.loss_curve, c.loss_curve);
}

TEST(GradCheckTest, ZeroWeightScorerOnFixture) {
  const auto data = ToyDataset(4, 1);
  ScorerWeights w = ScorerWeights::Zeros(18);
  w.b = {0.0, kInitialPoleBias};
  const auto rep = GradCheck(w, data[0], {}, 1e-4);
  // Every pixel ties for the argmax, so perturbing a weight moves it and
  // only the two biases keep the structure fixed.
  EXPECT_GE(rep.checked, 2u);
  EXPECT_LE(rep.max_rel_error, 1e-4);
}

TEST(GradCheckTest, TrainedWeightsPassAndErrorShrinksWithStep) {
  const auto data = ToyDataset(5, 3);
  TrainConfig cfg;
  cfg.epochs = 20;
  const auto trained = TrainPoles(data, cfg).weights;
  const auto rep = GradCheck(trained, data[0], {}, 1e-4);
  EXPECT_GT(rep.checked, 30u);
  EXPECT_LE(rep.max_rel_error, 1e-4);
  EXPECT_EQ(GradCheck(trained, data[0], {}, 1e-4).max_rel_error,
            rep.max_rel_error);
  EXPECT_THROW(GradCheck(trained, data[0], {}, 1e-2), ValidationError);
}

TEST(GradCheckTest, TruncationErrorGrowsQuadratically) {
  // At the gradcheck step sizes rounding dominates the error, so the O(h^2)
  // trend is measured at larger steps on the pole bias of the initial
  // scorer, where no threshold or argmax decision moves.
  const auto data = ToyDataset(5, 1);
  ScorerWeights trained = ScorerWeights::Zeros(18);
  trained.b = {0.0, kInitialPoleBias};
  const FloatRaster f = ExtractFeatures(data[0].image);
  const auto base = poleloss::CompositeLoss(Score(f, trained), data[0].poles,
                                            data[0].negatives);
  const double analytic = BackpropLogits(f, base.grad_logits).b[1];
  auto error = [&](double h) {
    ScorerWeights w = trained;
    const std::vector<double> x = {trained.b[1]};
    const std::vector<double> a = {analytic};
    return poleloss::CheckGradient(
               x, a, h,
               [&](const std::vector<double>& p, bool* stable) {
                 w.b[1] = p[0];
                 const auto b = poleloss::CompositeLoss(
                     Score(f, w), data[0].poles, data[0].negatives);
                 *stable = b.structure == base.structure;
                 return b.total;
               })
        .max_rel_error;
  };
  const double e1 = error(0.02);
  const double e2 = error(0.04);
  EXPECT_GT(e2 / e1, 3.0);
  EXPECT_LT(e2 / e1, 5.0);
}

// One unaugmented step with lr 1, mapped back to standardized space.
std::vector<double> FirstStep(const std::vector<PoleSample>& data, double clip) {
  TrainConfig cfg;
  cfg.lr = 1.0;
  cfg.epochs = 1;
  cfg.momentum = 0.0;
  cfg.augment = false;
  cfg.max_grad_norm = clip;
  const ScorerWeights w = TrainPoles(data, cfg).weights;
  std::vector<geo::FloatRaster> feats;
  for (const auto& s : data) feats.push_back(ExtractFeatures(s.image));
  const FeatureStats st = ComputeFeatureStats(feats);
  std::vector<double> step;
  for (int k = 0; k < 2; ++k) {
    double b = w.b[k] - (k == 1 ? kInitialPoleBias : 0.0);
    for (int f = 0; f < w.num_features; ++f) {
      step.push_back(w.W(f, k) * st.scale[f]);
      b += w.W(f, k) * st.mean[f];
    }
    step.push_back(b);
  }
  return step;
}

double Norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(TrainPolesTest, GradientClippingRescalesTheStep) {
  const auto data = ToyDataset(4, 3);
  const auto free = FirstStep(data, 0.0);
  const double n = Norm(free);
  ASSERT_GT(n, 1e-3);
  const auto clipped = FirstStep(data, n / 4);
  EXPECT_NEAR(Norm(clipped), n / 4, 1e-6 * n);
  for (std::size_t i = 0; i < free.size(); ++i) {
    EXPECT_NEAR(clipped[i], free[i] / 4, 1e-6 * n);
  }
  const auto loose = FirstStep(data, 2 * n);
  for (std::size_t i = 0; i < free.size(); ++i) EXPECT_NEAR(loose[i], free[i], 1e-9 * n);
}

TEST(TrainConfigTest, JsonRoundTrip) {
  TrainConfig c;
  c.lr = 0.05;
  c.epochs = 12;
  c.momentum = 0.9;
  c.seed = 99;
  c.augment = false;
  c.lambda_hard_neg = 0.0;
  c.max_grad_norm = 0.0;
  const TrainConfig d = TrainConfig::FromJson(c.ToJson());
  EXPECT_EQ(d.ToJson(), c.ToJson());
  EXPECT_THROW(TrainConfig::FromJson({{"learning_rate", 1}}), ValidationError);
  EXPECT_THROW(TrainConfig::FromJson({{"max_grad_norm", -1.0}}), ValidationError);
}

}  // namespace
}  // namespace pgrid::scorer
