#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "pgrid/metrics/metrics.h"
#include "pgrid/rasterops/components.h"
#include "pgrid/synth/synth.h"
#include "pgrid/unify/unify.h"

namespace pgrid::unify {
namespace {

using geo::FloatRaster;

FloatRaster PoleMap(int w, int h, double px = 0.06) {
  FloatRaster m(w, h, 2, geo::AffineGeoref::NorthUp(100.0, 200.0, px), 0.0f);
  for (auto& v : m.plane(0)) v = 1.0f;
  return m;
}

void Paint(FloatRaster& m, int c0, int r0, int c1, int r1, float p) {
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      m(c, r, 1) = p;
      m(c, r, 0) = 1.0f - p;
    }
  }
}

TEST(ExtractPolesTest, EmptyMap) {
  EXPECT_TRUE(ExtractPoles(PoleMap(30, 30)).points.empty());
}

TEST(ExtractPolesTest, BlobCentroid) {
  FloatRaster m = PoleMap(40, 40);
  Paint(m, 15, 15, 24, 24, 0.8f);
  m(20, 21, 1) = 0.95f;
  const auto poles = ExtractPoles(m);
  ASSERT_EQ(poles.size(), 1u);
  const geo::Point2 want = m.georef().PixelToWorld(20.0, 20.0);
  EXPECT_NEAR(poles.points[0].position.x, want.x, 0.03);
  EXPECT_NEAR(poles.points[0].position.y, want.y, 0.03);
  EXPECT_NEAR(*poles.points[0].confidence, 0.95, 1e-6);
  EXPECT_EQ(poles.points[0].id, 1);
}

TEST(ExtractPolesTest, SmallBlobDropped) {
  FloatRaster m = PoleMap(40, 40);
  Paint(m, 2, 2, 5, 5, 0.9f);     // 16 px
  Paint(m, 30, 30, 31, 32, 0.9f);  // 6 px
  EXPECT_EQ(ExtractPoles(m, 0.5, 8).size(), 1u);
  EXPECT_EQ(ExtractPoles(m, 0.5, 1).size(), 2u);
}

TEST(ExtractPolesTest, CentroidsInsideBlobBoxes) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 50; ++trial) {
    FloatRaster m = PoleMap(32, 32, 1.0);
    for (int k = 0; k < 6; ++k) {
      const int c = rng() % 28, r = rng() % 28;
      Paint(m, c, r, c + rng() % 4, r + rng() % 4, 0.5f + 0.5f * u(rng));
    }
    const auto blobs = rasterops::ConnectedComponents(rasterops::Threshold(m, 1, 0.5f), 8);
    const auto poles = ExtractPoles(m, 0.5, 3);
    ASSERT_LE(static_cast<int>(poles.size()), blobs.blob_count);
    for (const auto& p : poles.points) {
      const geo::Point2 px = m.georef().WorldToPixel(p.position.x, p.position.y);
      const int label = blobs.labels(static_cast<int>(px.x), static_cast<int>(px.y));
      bool in_box = false;
      for (const auto& st : blobs.stats) {
        in_box |= px.x >= st.min_col && px.x <= st.max_col + 1 && px.y >= st.min_row &&
                  px.y <= st.max_row + 1;
      }
      ASSERT_TRUE(in_box);
      (void)label;
    }
  }
}

FloatRaster LineMap(int w, int h, double px) {
  return FloatRaster(w, h, 1, geo::AffineGeoref::NorthUp(0.0, h * px, px), 0.0f);
}

TEST(ExtractLinesTest, EmptyRaster) {
  const auto l = ExtractLines(LineMap(50, 50, 0.1));
  EXPECT_TRUE(l.skeletons.lines.empty());
  EXPECT_TRUE(l.corridors.polygons.empty());
}

TEST(ExtractLinesTest, StraightCorridor) {
  const double px = 0.1;
  FloatRaster m = LineMap(1040, 60, px);
  // A 3 px wide stroke, 100 m long.
  for (int r = 29; r < 32; ++r) {
    for (int c = 20; c < 1020; ++c) m(c, r) = 1.0f;
  }
  const auto l = ExtractLines(m);
  ASSERT_EQ(l.skeletons.size(), 1u);
  ASSERT_EQ(l.corridors.size(), 1u);
  EXPECT_NEAR(l.skeletons.lines[0].Length(), 100.0, 2 * px);
  const auto& poly = l.corridors.polygons[0];
  EXPECT_EQ(poly.id, l.skeletons.lines[0].id);
  const double yc = m.georef().PixelToWorld(0, 30.5).y;
  for (double x = 5.0; x <= 98.0; x += 3.1) {
    EXPECT_TRUE(poly.Contains({x, yc + 2.0 - 2 * px}));
    EXPECT_TRUE(poly.Contains({x, yc - 2.0 + 2 * px}));
    EXPECT_FALSE(poly.Contains({x, yc + 2.0 + 2 * px}));
    EXPECT_FALSE(poly.Contains({x, yc - 2.0 - 2 * px}));
  }
}

TEST(ExtractLinesTest, PlusGivesFourArms) {
  FloatRaster m = LineMap(41, 41, 0.5);
  for (int i = 2; i < 39; ++i) {
    m(20, i) = 1.0f;
    m(i, 20) = 1.0f;
  }
  const auto l = ExtractLines(m);
  EXPECT_EQ(l.skeletons.size(), 4u);
  for (const auto& line : l.skeletons.lines) {
    for (const auto& v : line.vertices) {
      bool inside = false;
      for (const auto& poly : l.corridors.polygons) inside |= poly.Contains(v);
      EXPECT_TRUE(inside);
    }
  }
}

TEST(ExtractLinesTest, BreakBlocksLeavesThinSkeleton) {
  geo::ByteRaster s(6, 6, 1, {}, 0);
  s(2, 2) = s(3, 2) = s(2, 3) = s(3, 3) = 1;
  s(1, 1) = s(4, 1) = s(1, 4) = s(4, 4) = 1;
  const auto b = BreakBlocks(s);
  EXPECT_EQ(b(2, 2), 0);
  EXPECT_EQ(b(3, 3), 1);
}

TEST(UnifyTest, LayersAndCrs) {
  const geo::GridLayout empty = Unify(geo::PointAnnotations{}, LineLayers{});
  EXPECT_TRUE(empty.poles.points.empty());
  EXPECT_TRUE(empty.line_skeletons.lines.empty());
  geo::PointAnnotations p;
  p.epsg = 32636;
  EXPECT_THROW(Unify(p, LineLayers{}), ValidationError);
}

TEST(UnifyTest, ThreeFilesRoundTrip) {
  geo::GridLayout layout;
  layout.poles.points.push_back({1, {1, 2}, geo::Polarity::kPole, 0.7});
  layout.line_skeletons.lines.push_back({1, {{0, 0}, {10, 0}}, std::nullopt});
  layout.line_polygons.polygons.push_back({1, {{0, 0}, {1, 0}, {1, 1}}, {}});
  layout.provenance = {{"source", "test"}};
  const auto dir = std::filesystem::temp_directory_path() / "pgrid_unify_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  WriteLayout(layout, dir, "grid");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    ++files;
    EXPECT_EQ(e.path().extension(), ".geojson");
  }
  EXPECT_EQ(files, 3);
  const auto back = ReadLayout(dir, "grid");
  EXPECT_EQ(back.poles, layout.poles);
  EXPECT_EQ(back.line_skeletons, layout.line_skeletons);
  EXPECT_EQ(back.line_polygons, layout.line_polygons);
  EXPECT_EQ(back.provenance, layout.provenance);
  std::filesystem::remove_all(dir);
}

geo::GridLayout TwoPoles(geo::Point2 end_a, geo::Point2 end_b) {
  geo::GridLayout g;
  g.poles.points.push_back({1, {0, 0}, geo::Polarity::kPole, std::nullopt});
  g.poles.points.push_back({2, {30, 0}, geo::Polarity::kPole, std::nullopt});
  g.line_skeletons.lines.push_back({1, {end_a, {15, 0}, end_b}, std::nullopt});
  return g;
}

TEST(SnapGraphTest, JoinsAndSkips) {
  EXPECT_EQ(SnapGraph(TwoPoles({0.4, 0}, {29.5, 0.2}), 1.0), (std::vector<Edge>{{1, 2}}));
  EXPECT_TRUE(SnapGraph(TwoPoles({0.4, 0}, {27.0, 0}), 1.0).empty());
  EXPECT_THROW(SnapGraph(TwoPoles({0, 0}, {30, 0}), 0.0), ValidationError);
  auto dup = TwoPoles({0.4, 0}, {29.5, 0.2});
  dup.line_skeletons.lines.push_back({2, {{29.8, 0}, {0.1, 0.1}}, std::nullopt});
  EXPECT_EQ(SnapGraph(dup, 1.0).size(), 1u);
}

TEST(SnapGraphTest, ForestCheck) {
  EXPECT_TRUE(IsForest({{1, 2}, {2, 3}, {5, 6}}));
  EXPECT_FALSE(IsForest({{1, 2}, {2, 3}, {1, 3}}));
}

// Oracle rasters of a synthetic scene go through extraction and come back as
// the generator's poles and edges.
TEST(SynthRoundTripTest, OracleScenes) {
  synth::SceneConfig cfg;
  cfg.extent_x = cfg.extent_y = 100.0;
  cfg.line_visibility = 1.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto scene = synth::GenerateScene(cfg, seed);
    const auto oracle = synth::OraclePredict(scene);
    const auto poles = ExtractPoles(oracle.poles);
    const auto lines = ExtractLines(oracle.lines);
    const auto layout = Unify(poles, lines, {{"seed", seed}});

    const auto match = metrics::MatchStrict(scene.poles, poles, cfg.resolution);
    ASSERT_EQ(match.tp, scene.poles.size()) << seed;
    ASSERT_EQ(match.fp, 0u);
    std::map<std::int64_t, std::int64_t> to_gt;
    for (const auto& p : match.pairs) to_gt[p.pred_id] = p.gt_id;

    std::vector<Edge> got;
    for (auto [a, b] : SnapGraph(layout, 1.5)) {
      got.emplace_back(std::min(to_gt[a], to_gt[b]), std::max(to_gt[a], to_gt[b]));
    }
    std::sort(got.begin(), got.end());
    auto want = scene.edges;
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want) << seed;
    EXPECT_TRUE(IsForest(got));
    EXPECT_EQ(lines.skeletons.size(), scene.lines.size());
  }
}

}  // namespace
}  // namespace pgrid::unify
