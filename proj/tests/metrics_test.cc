#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pgrid/metrics/metrics.h"
#include "pgrid/rasterops/buffer.h"

namespace pgrid::metrics {
namespace {

using geo::AnnotatedPoint;
using geo::PointAnnotations;

PointAnnotations Points(std::initializer_list<std::pair<double, double>> xy,
                        std::int64_t first_id = 1) {
  PointAnnotations out;
  std::int64_t id = first_id;
  for (auto [x, y] : xy) out.points.push_back({id++, {x, y}, geo::Polarity::kPole, std::nullopt});
  return out;
}

// Coordinates on a quarter-metre lattice so translations are exact.
PointAnnotations RandomPoints(std::mt19937& rng, int n, double extent, bool conf) {
  std::uniform_int_distribution<int> q(0, static_cast<int>(extent * 4));
  std::uniform_real_distribution<double> c(0.0, 1.0);
  PointAnnotations out;
  for (int i = 0; i < n; ++i) {
    AnnotatedPoint p{i + 1, {q(rng) * 0.25, q(rng) * 0.25}, geo::Polarity::kPole, std::nullopt};
    if (conf) p.confidence = c(rng);
    out.points.push_back(p);
  }
  return out;
}

TEST(MatchStrictTest, SinglePair) {
  const auto m = MatchStrict(Points({{0, 0}}), Points({{3, 0}}), 5);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 0u);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_DOUBLE_EQ(m.pairs[0].distance, 3.0);
}

TEST(MatchStrictTest, ExtraPredictionIsFalsePositive) {
  const auto m = MatchStrict(Points({{0, 0}}), Points({{4, 0}, {0, 2}}), 5);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.pairs[0].pred_id, 2);
}

TEST(MatchStrictTest, RejectsNonPositiveThreshold) {
  EXPECT_THROW(MatchStrict(Points({}), Points({}), 0.0), ValidationError);
}

TEST(MatchStrictTest, IgnoresHardNegatives) {
  auto pred = Points({{1, 0}});
  pred.points[0].polarity = geo::Polarity::kHardNegative;
  const auto m = MatchStrict(Points({{0, 0}}), pred, 5);
  EXPECT_EQ(m.tp, 0u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 1u);
}

// Repeatedly takes the closest remaining free pair.
std::size_t GreedyOracle(const PointAnnotations& g, const PointAnnotations& p, double th) {
  std::vector<bool> gu(g.size()), pu(p.size());
  std::size_t tp = 0;
  for (;;) {
    double best = th;
    int bi = -1, bj = -1;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (gu[i] || pu[j]) continue;
        const double d = std::hypot(g.points[i].position.x - p.points[j].position.x,
                                    g.points[i].position.y - p.points[j].position.y);
        const bool better = d < best || (d == best && (bi < 0 || g.points[i].id < g.points[bi].id ||
                                                       (g.points[i].id == g.points[bi].id &&
                                                        p.points[j].id < p.points[bj].id)));
        if (d <= th && better) {
          best = d;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    if (bi < 0) return tp;
    gu[bi] = pu[bj] = true;
    ++tp;
  }
}

TEST(MatchStrictTest, AgreesWithGreedyOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = RandomPoints(rng, 20, 60, false);
    const auto p = RandomPoints(rng, 20, 60, false);
    for (double th : {5.0, 7.0, 10.0}) {
      const auto m = MatchStrict(g, p, th);
      ASSERT_EQ(m.tp, GreedyOracle(g, p, th));
      ASSERT_EQ(m.tp + m.fp, 20u);
      ASSERT_EQ(m.tp + m.fn, 20u);
      std::vector<std::int64_t> gi, pi;
      for (const auto& pr : m.pairs) {
        ASSERT_LE(pr.distance, th);
        gi.push_back(pr.gt_id);
        pi.push_back(pr.pred_id);
      }
      std::sort(gi.begin(), gi.end());
      std::sort(pi.begin(), pi.end());
      ASSERT_EQ(std::adjacent_find(gi.begin(), gi.end()), gi.end());
      ASSERT_EQ(std::adjacent_find(pi.begin(), pi.end()), pi.end());
    }
  }
}

TEST(MatchAllTest, ManyToOne) {
  const auto m = MatchAll(Points({{0, 0}}), Points({{1, 0}, {0, 2}, {-3, 0}}), 5);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 0u);
  for (const auto& pr : m.pairs) EXPECT_EQ(pr.gt_id, 1);
}

TEST(MatchAllTest, NoPredictions) {
  const auto m = MatchAll(Points({{0, 0}, {9, 9}}), Points({}), 5);
  EXPECT_EQ(m.tp, 0u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 2u);
}

TEST(MatchAllTest, PairsWithNearestGroundTruth) {
  const auto m = MatchAll(Points({{0, 0}, {6, 0}}), Points({{4, 0}}), 5);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].gt_id, 2);
  EXPECT_EQ(m.fn, 0u);
}

TEST(MatchPropertyTest, AllDominatesStrict) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = RandomPoints(rng, 1 + rng() % 15, 50, false);
    const auto p = RandomPoints(rng, rng() % 20, 50, false);
    for (double th : {5.0, 7.0, 10.0}) {
      const ThresholdRow row = EvaluatePoles(g, p, th);
      ASSERT_GE(row.p_a, row.p_s);
      ASSERT_GE(row.f1_a + 1e-12, row.f1_s);
      for (double v : {row.p_s, row.p_a, row.r, row.f1_s, row.f1_a}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      ASSERT_NEAR(row.f1_s, HarmonicMean(row.p_s, row.r), 1e-9);
      ASSERT_NEAR(row.f1_a, HarmonicMean(row.p_a, row.r), 1e-9);
    }
  }
}

TEST(MatchPropertyTest, RecallGrowsWithThreshold) {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = RandomPoints(rng, 12, 40, false);
    const auto p = RandomPoints(rng, 12, 40, false);
    for (MatchVariant v : {MatchVariant::kStrict, MatchVariant::kAll}) {
      std::size_t prev = 0;
      for (double th = 0.5; th <= 20; th += 0.5) {
        const auto m = Match(g, p, th, v);
        ASSERT_GE(m.gt_detected, prev);
        prev = m.gt_detected;
      }
    }
  }
}

TEST(MatchPropertyTest, TranslationInvariant) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = RandomPoints(rng, 10, 40, false);
    auto p = RandomPoints(rng, 10, 40, false);
    const auto a = MatchStrict(g, p, 7);
    const auto aa = MatchAll(g, p, 7);
    for (auto* set : {&g, &p}) {
      for (auto& pt : set->points) {
        pt.position.x += 1024.0;
        pt.position.y -= 4096.0;
      }
    }
    const auto b = MatchStrict(g, p, 7);
    const auto bb = MatchAll(g, p, 7);
    ASSERT_EQ(a.tp, b.tp);
    ASSERT_EQ(aa.tp, bb.tp);
    ASSERT_EQ(aa.fn, bb.fn);
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
      ASSERT_EQ(a.pairs[i].gt_id, b.pairs[i].gt_id);
      ASSERT_EQ(a.pairs[i].pred_id, b.pairs[i].pred_id);
    }
  }
}

TEST(PrfTest, Formula) {
  Prf a = ComputePrf(7, 3, 0);
  EXPECT_NEAR(a.precision, 0.7, 1e-12);
  EXPECT_NEAR(a.recall, 1.0, 1e-12);
  EXPECT_NEAR(a.f1, 0.823529, 1e-6);
  Prf b = ComputePrf(5, 0, 5);
  EXPECT_NEAR(b.precision, 1.0, 1e-12);
  EXPECT_NEAR(b.recall, 0.5, 1e-12);
  EXPECT_NEAR(b.f1, 0.666667, 1e-6);
  Prf c = ComputePrf(0, 0, 0);
  EXPECT_EQ(c.precision, 0.0);
  EXPECT_EQ(c.recall, 0.0);
  EXPECT_EQ(c.f1, 0.0);
}

TEST(PrfTest, F1ZeroIffNoTruePositive) {
  for (std::size_t tp = 0; tp < 5; ++tp) {
    for (std::size_t fp = 0; fp < 5; ++fp) {
      for (std::size_t fn = 0; fn < 5; ++fn) {
        const Prf p = ComputePrf(tp, fp, fn);
        EXPECT_EQ(p.f1 == 0.0, tp == 0);
        EXPECT_LE(p.f1, 1.0);
      }
    }
  }
}

PointAnnotations WithConfidence(PointAnnotations p, std::initializer_list<double> c) {
  auto it = c.begin();
  for (auto& pt : p.points) pt.confidence = *it++;
  return p;
}

TEST(DmapTest, HandStaircase) {
  const auto g = Points({{0, 0}, {100, 0}, {200, 0}});
  // Ranked: hit, miss, hit, duplicate, hit. The PR points are (1/3, 1),
  // (1/3, 1/2), (2/3, 2/3), (2/3, 1/2), (1, 3/5).
  const auto p = WithConfidence(Points({{1, 0}, {500, 0}, {101, 0}, {2, 0}, {199, 0}}),
                                {0.9, 0.8, 0.7, 0.6, 0.5});
  const double want = (1.0 + 2.0 / 3.0 + 0.6) / 3.0;
  EXPECT_NEAR(AveragePrecision(g, p, 10), want, 1e-12);
  EXPECT_NEAR(want, 0.755556, 1e-6);
}

TEST(DmapTest, AllCorrectIsOne) {
  const auto g = Points({{0, 0}, {50, 0}});
  EXPECT_DOUBLE_EQ(AveragePrecision(g, WithConfidence(Points({{1, 1}, {49, 0}}), {0.1, 0.7}), 10),
                   1.0);
}

TEST(DmapTest, SingleWrongIsZero) {
  EXPECT_EQ(AveragePrecision(Points({{0, 0}}), WithConfidence(Points({{99, 0}}), {0.5}), 10), 0.0);
}

TEST(DmapTest, MissingConfidenceThrows) {
  EXPECT_THROW(AveragePrecision(Points({{0, 0}}), Points({{1, 0}}), 10), ValidationError);
}

TEST(DmapTest, AppendingLowestCorrectNeverHurts) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = RandomPoints(rng, 1 + rng() % 8, 60, false);
    auto p = RandomPoints(rng, rng() % 10, 60, true);
    for (MatchVariant v : {MatchVariant::kStrict, MatchVariant::kAll}) {
      const double before = AveragePrecision(g, p, 7, v);
      ASSERT_GE(before, 0.0);
      ASSERT_LE(before, 1.0 + 1e-12);
      // Place the new prediction on a ground-truth point the full set misses.
      const auto m = MatchStrict(g, p, 7);
      std::int64_t target = g.points.front().id;
      for (const auto& gp : g.points) {
        const bool hit = std::any_of(m.pairs.begin(), m.pairs.end(),
                                     [&](const MatchPair& pr) { return pr.gt_id == gp.id; });
        if (!hit) {
          target = gp.id;
          break;
        }
      }
      auto q = p;
      q.points.push_back({1000, g.points[target - 1].position, geo::Polarity::kPole, -1.0});
      ASSERT_GE(AveragePrecision(g, q, 7, v) + 1e-12, before);
    }
  }
}

TEST(DmapTest, MeanOfRegions) {
  const double aps[] = {1.0, 0.5, 0.0};
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(aps), 0.5);
  EXPECT_EQ(MeanAveragePrecision({}), 0.0);
}

geo::ByteRaster RandomMask(std::mt19937& rng, int n, double density) {
  std::bernoulli_distribution b(density);
  geo::ByteRaster m(n, n, 1, geo::AffineGeoref::NorthUp(0, n * 0.5, 0.5), 0);
  for (auto& v : m.data()) v = b(rng);
  return m;
}

TEST(LineMetricsTest, ConfusionMatrixOracle) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = RandomMask(rng, 64, 0.3);
    const auto g = RandomMask(rng, 64, 0.2);
    int tp = 0, fp = 0, fn = 0, tn = 0;
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) {
        const bool a = p(c, r), b = g(c, r);
        (a ? (b ? tp : fp) : (b ? fn : tn))++;
      }
    }
    const LineMetrics m = MaskMetrics(p, g);
    const double iou1 = double(tp) / (tp + fp + fn);
    const double iou0 = double(tn) / (tn + fp + fn);
    EXPECT_NEAR(m.miou, (iou1 + iou0) / 2, 1e-12);
    EXPECT_NEAR(m.precision, double(tp) / (tp + fp), 1e-12);
    EXPECT_NEAR(m.recall, double(tp) / (tp + fn), 1e-12);
    EXPECT_NEAR(m.f1, 2.0 * tp / (2.0 * tp + fp + fn), 1e-12);
  }
}

geo::PolylineSet OneLine() {
  geo::PolylineSet s;
  s.lines.push_back({1, {{2.0, 10.0}, {28.0, 20.0}}, std::nullopt});
  return s;
}

TEST(LineMetricsTest, PerfectAndEmptyPredictions) {
  const auto g = geo::AffineGeoref::NorthUp(0, 32, 0.5);
  const auto truth = rasterops::BufferPolylines(OneLine(), 2.0, g, 64, 64);
  const LineMetrics perfect = PixelLineMetrics(truth, OneLine());
  EXPECT_DOUBLE_EQ(perfect.miou, 1.0);
  EXPECT_DOUBLE_EQ(perfect.f1, 1.0);

  const geo::ByteRaster empty(64, 64, 1, g, 0);
  const LineMetrics none = PixelLineMetrics(empty, OneLine());
  EXPECT_EQ(none.line_iou, 0.0);
  EXPECT_NEAR(none.miou, none.background_iou / 2, 1e-15);
  EXPECT_EQ(none.f1, 0.0);
}

TEST(LineMetricsTest, LinesOutsideExtentThrow) {
  const geo::ByteRaster mask(64, 64, 1, geo::AffineGeoref::NorthUp(5000, 5000, 0.5), 0);
  EXPECT_THROW(PixelLineMetrics(mask, OneLine()), ShapeError);
  geo::PolylineSet other = OneLine();
  other.epsg = 32633;
  const geo::ByteRaster m2(64, 64, 1, geo::AffineGeoref::NorthUp(0, 32, 0.5, 32634), 0);
  EXPECT_THROW(PixelLineMetrics(m2, other), ShapeError);
}

TEST(ReportTest, JsonRoundTripAndCsv) {
  RegionReport r;
  r.region = "north";
  r.thresholds.push_back(EvaluatePoles(Points({{0, 0}, {20, 0}}), Points({{1, 0}, {2, 0}}), 5));
  r.lines = LineMetrics{0.8, 0.7, 0.9, 0.75, 0.85, HarmonicMean(0.75, 0.85)};
  r.dmap = 0.5;
  const auto j = ToJson(r);
  EXPECT_EQ(j["thresholds"][0]["P_S"], 0.5);
  EXPECT_EQ(j["thresholds"][0]["P_A"], 1.0);
  EXPECT_EQ(j["thresholds"][0]["R"], 0.5);
  const RegionReport back = ReportFromJson(j);
  EXPECT_EQ(ToJson(back), j);
  const RegionReport reps[] = {r};
  const std::string csv = ToCsv(reps);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "region,th,P_S,P_A,R,F1_S,F1_A,miou,p,r,f1,dmap");
  EXPECT_NE(csv.find("north,5,0.5,1,0.5,"), std::string::npos);
}

}  // namespace
}  // namespace pgrid::metrics
