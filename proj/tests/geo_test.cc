#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "pgrid/geo/raster_io.h"
#include "pgrid/geo/types.h"
#include "pgrid/geo/vector_io.h"

namespace pgrid::geo {
namespace {

namespace fs = std::filesystem;

fs::path TempPath(const std::string& name) {
  return fs::temp_directory_path() / ("pgrid_geo_test_" + name);
}

TEST(AffineGeorefTest, IdentityMapping) {
  AffineGeoref g;
  const Point2 p = g.PixelToWorld(3, 2);
  EXPECT_DOUBLE_EQ(p.x, 3.0);
  EXPECT_DOUBLE_EQ(p.y, -2.0);
}

TEST(AffineGeorefTest, SixCentimetreGrid) {
  const auto g = AffineGeoref::NorthUp(100.0, 500.0, 0.06);
  const Point2 p = g.PixelToWorld(10, 10);
  EXPECT_NEAR(p.x, 100.6, 1e-12);
  EXPECT_NEAR(p.y, 499.4, 1e-12);
}

TEST(AffineGeorefTest, RoundTripRandomPoints) {
  AffineGeoref g;
  g.origin_x = 250123.5;
  g.origin_y = 9812345.25;
  g.px_w = 0.06;
  g.px_h = -0.059;
  g.rot_x = 0.004;
  g.rot_y = -0.003;
  g.Validate();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 4096.0);
  for (int i = 0; i < 1000; ++i) {
    const double col = u(rng);
    const double row = u(rng);
    const Point2 w = g.PixelToWorld(col, row);
    const Point2 back = g.WorldToPixel(w.x, w.y);
    const Point2 w2 = g.PixelToWorld(back.x, back.y);
    EXPECT_NEAR(w2.x, w.x, 1e-9);
    EXPECT_NEAR(w2.y, w.y, 1e-9);
    EXPECT_NEAR(back.x, col, 1e-6);
    EXPECT_NEAR(back.y, row, 1e-6);
  }
}

TEST(AffineGeorefTest, SingularRejected) {
  AffineGeoref g;
  g.px_w = 0.0;
  EXPECT_THROW(g.Validate(), ValidationError);
}

TEST(RasterTest, LengthInvariant) {
  EXPECT_THROW(FloatRaster(2, 2, 1, std::vector<float>(3), AffineGeoref{}),
               ValidationError);
}

TEST(RasterIoTest, SinglePixelFloatRoundTripsBitExact) {
  FloatRaster r(1, 1, 1, AffineGeoref::NorthUp(5, 7, 0.06), 0.5f);
  const auto bytes = EncodeRaster(r);
  ASSERT_EQ(bytes.size(), kPgrdHeaderSize + 4);
  const AnyRaster back = DecodeRaster(bytes);
  ASSERT_TRUE(std::holds_alternative<FloatRaster>(back));
  EXPECT_EQ(std::get<FloatRaster>(back), r);
  EXPECT_EQ(EncodeRaster(back), bytes);
}

TEST(RasterIoTest, PayloadLengthMatchesHeader) {
  for (int channels : {1, 2, 3}) {
    ByteRaster b(512, 512, channels);
    FloatRaster f(512, 512, channels);
    EXPECT_EQ(EncodeRaster(b).size(),
              kPgrdHeaderSize + 512u * 512u * channels * 1u);
    EXPECT_EQ(EncodeRaster(f).size(),
              kPgrdHeaderSize + 512u * 512u * channels * 4u);
  }
}

TEST(RasterIoTest, FileRoundTripWithNodata) {
  ByteRaster r(7, 5, 3, AffineGeoref::NorthUp(0, 10, 0.25, 32736));
  for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] = i * 7 % 251;
  r.set_nodata(255.0);
  const fs::path path = TempPath("nodata.pgr");
  WriteRaster(r, path);
  const AnyRaster back = ReadRaster(path);
  EXPECT_EQ(std::get<ByteRaster>(back), r);
  EXPECT_EQ(EncodeRaster(back), EncodeRaster(r));
  fs::remove(path);
}

TEST(RasterIoTest, BadMagic) {
  auto bytes = EncodeRaster(FloatRaster(2, 2, 1));
  bytes[0] = 'X';
  bytes[1] = 'X';
  bytes[2] = 'X';
  bytes[3] = 'X';
  try {
    DecodeRaster(bytes);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
    EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
  }
}

TEST(RasterIoTest, TruncatedPayload) {
  auto bytes = EncodeRaster(FloatRaster(4, 4, 2));
  bytes.resize(bytes.size() - 3);
  try {
    DecodeRaster(bytes);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("truncated payload"),
              std::string::npos);
  }
}

TEST(RasterIoTest, TruncatedHeaderNamesOffset) {
  auto bytes = EncodeRaster(FloatRaster(4, 4, 1));
  bytes.resize(20);
  try {
    DecodeRaster(bytes);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 16u);
  }
}

TEST(RasterIoTest, UnsupportedDtype) {
  auto bytes = EncodeRaster(FloatRaster(1, 1, 1));
  bytes[5] = 9;
  try {
    DecodeRaster(bytes);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
}

TEST(RasterIoTest, RandomRastersAreCanonical) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + rng() % 9;
    const int h = 1 + rng() % 9;
    const int c = 1 + rng() % 3;
    FloatRaster r(w, h, c, AffineGeoref::NorthUp(rng() % 100, rng() % 100, 0.5));
    std::normal_distribution<float> n;
    for (auto& v : r.data()) v = n(rng);
    if (trial % 2) r.set_nodata(-9999.0);
    const auto bytes = EncodeRaster(r);
    EXPECT_EQ(EncodeRaster(DecodeRaster(bytes)), bytes);
  }
}

PointAnnotations ThreePoles() {
  PointAnnotations pa;
  for (int i = 0; i < 3; ++i) {
    pa.points.push_back({i + 1, {10.0 * i, 5.0}, Polarity::kPole, {}});
  }
  return pa;
}

TEST(VectorIoTest, ThreePolesParse) {
  const VectorLayer layer = ParseGeoJson(ToGeoJson(ThreePoles()));
  ASSERT_TRUE(std::holds_alternative<PointAnnotations>(layer));
  const auto& pa = std::get<PointAnnotations>(layer);
  EXPECT_EQ(pa.size(), 3u);
  for (const auto& p : pa.points) EXPECT_EQ(p.polarity, Polarity::kPole);
}

TEST(VectorIoTest, SingleVertexLineRejected) {
  nlohmann::json doc = {
      {"type", "FeatureCollection"},
      {"features",
       {{{"type", "Feature"},
         {"properties", {{"id", 4}}},
         {"geometry",
          {{"type", "LineString"}, {"coordinates", {{1.0, 2.0}}}}}}}}};
  EXPECT_THROW(ParseGeoJson(doc), ValidationError);
}

TEST(VectorIoTest, MixedGeometryListsOffendingIds) {
  nlohmann::json doc = ToGeoJson(ThreePoles());
  doc["features"][1]["geometry"] = {{"type", "LineString"},
                                    {"coordinates", {{0, 0}, {1, 1}}}};
  try {
    ParseGeoJson(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ids: 2"), std::string::npos)
        << e.what();
  }
}

TEST(VectorIoTest, DuplicateIdsRejected) {
  auto pa = ThreePoles();
  pa.points[2].id = 1;
  EXPECT_THROW(ParseGeoJson(ToGeoJson(pa)), ValidationError);
}

TEST(VectorIoTest, HundredFeatureFixtureRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  PointAnnotations pa;
  pa.epsg = 32736;
  PolylineSet ls;
  ls.epsg = 32736;
  for (int i = 0; i < 100; ++i) {
    AnnotatedPoint p{i * 3 + 1, {u(rng), u(rng)},
                     i % 4 == 0 ? Polarity::kHardNegative : Polarity::kPole,
                     {}};
    if (i % 2) p.confidence = (i % 10) / 10.0;
    pa.points.push_back(p);
    Polyline l{i, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}, {}};
    ls.lines.push_back(l);
  }
  const fs::path pp = TempPath("points.geojson");
  const fs::path lp = TempPath("lines.geojson");
  WriteVectors(pa, pp);
  WriteVectors(ls, lp);
  EXPECT_EQ(ReadPoints(pp), pa);
  EXPECT_EQ(ReadPolylines(lp), ls);
  fs::remove(pp);
  fs::remove(lp);
}

TEST(VectorIoTest, PolygonRingClosedOnWriteOpenInMemory) {
  PolygonSet ps;
  ps.polygons.push_back({7, {{0, 0}, {2, 0}, {2, 1}, {0, 1}}});
  const auto doc = ToGeoJson(ps);
  EXPECT_EQ(doc["features"][0]["geometry"]["coordinates"][0].size(), 5u);
  EXPECT_EQ(std::get<PolygonSet>(ParseGeoJson(doc)), ps);
  EXPECT_DOUBLE_EQ(ps.polygons[0].Area(), 2.0);
}

TEST(VectorIoTest, EmptyCollectionReadsAsAnyKind) {
  const fs::path p = TempPath("empty.geojson");
  WriteVectors(PolylineSet{}, p);
  EXPECT_TRUE(ReadPolylines(p).lines.empty());
  EXPECT_TRUE(ReadPoints(p).points.empty());
  fs::remove(p);
}

}  // namespace
}  // namespace pgrid::geo
