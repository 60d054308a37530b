#include "pgrid/synth/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "pgrid/geo/raster_io.h"
#include "pgrid/geo/vector_io.h"
#include "pgrid/rasterops/resample.h"

namespace pgrid::synth {

using geo::Point2;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMargin = 2.0;
constexpr double kSpanClearance = 8.0;
constexpr double kMinBranchAngle = 45.0 * kDeg;
constexpr double kDistractorClearance = 4.0;

double Cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool SegmentsCross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = Cross(c, d, a), d2 = Cross(c, d, b);
  const double d3 = Cross(a, b, c), d4 = Cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double SegmentDistance(Point2 a, Point2 b, Point2 c, Point2 d) {
  if (SegmentsCross(a, b, c, d)) return 0.0;
  return std::min({geo::PointSegmentDistance(a, c, d), geo::PointSegmentDistance(b, c, d),
                   geo::PointSegmentDistance(c, a, b), geo::PointSegmentDistance(d, a, b)});
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Network {
  std::vector<Point2> poles;
  std::vector<std::pair<int, int>> spans;  // parent, child (indices)
};

class NetworkBuilder {
 public:
  NetworkBuilder(const SceneConfig& c, std::mt19937_64& rng) : c_(c), rng_(rng) {}

  Network Build() {
    for (int attempt = 0; attempt < 50 && net_.spans.empty(); ++attempt) {
      net_ = {};
      const Point2 start{kMargin + Uniform(rng_, 0.0, 0.1 * c_.extent_x),
                         Uniform(rng_, 0.3, 0.7) * c_.extent_y};
      net_.poles.push_back(start);
      Grow(0, Uniform(rng_, -20.0, 20.0) * kDeg, 1 << 20);
    }
    if (net_.spans.empty()) {
      throw ValidationError("scene extent is too small to hold one span");
    }
    for (int b = 0; b < c_.branch_count; ++b) {
      for (int attempt = 0; attempt < 30; ++attempt) {
        const int from = static_cast<int>(rng_() % net_.poles.size());
        const double base = IncidentHeading(from);
        const double side = (rng_() & 1) ? 1.0 : -1.0;
        const double heading = base + side * Uniform(rng_, 60.0, 120.0) * kDeg;
        if (Grow(from, heading, c_.max_branch_spans) > 0) break;
      }
    }
    return net_;
  }

 private:
  // Extends a chain from pole `from`; returns the number of spans added.
  int Grow(int from, double heading, int max_spans) {
    int added = 0;
    while (added < max_spans) {
      bool ok = false;
      for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
        const double h = heading + (attempt == 0 ? 0.0 : Uniform(rng_, -20.0, 20.0) * kDeg);
        const double len = Uniform(rng_, c_.spacing_min, c_.spacing_max);
        const Point2 a = net_.poles[from];
        const Point2 b{a.x + len * std::cos(h), a.y + len * std::sin(h)};
        if (Valid(from, b)) {
          net_.poles.push_back(b);
          net_.spans.emplace_back(from, static_cast<int>(net_.poles.size()) - 1);
          from = static_cast<int>(net_.poles.size()) - 1;
          heading = h + Uniform(rng_, -15.0, 15.0) * kDeg;
          ok = true;
        }
      }
      if (!ok) break;
      ++added;
    }
    return added;
  }

  double IncidentHeading(int p) const {
    for (const auto& [u, v] : net_.spans) {
      if (u == p || v == p) {
        const Point2 a = net_.poles[u], b = net_.poles[v];
        return std::atan2(b.y - a.y, b.x - a.x);
      }
    }
    return 0.0;
  }

  bool Valid(int from, Point2 b) const {
    if (b.x < kMargin || b.y < kMargin || b.x > c_.extent_x - kMargin ||
        b.y > c_.extent_y - kMargin) {
      return false;
    }
    const Point2 a = net_.poles[from];
    for (std::size_t i = 0; i < net_.poles.size(); ++i) {
      if (static_cast<int>(i) != from && geo::Distance(net_.poles[i], b) < 0.8 * c_.spacing_min) {
        return false;
      }
    }
    const double ha = std::atan2(b.y - a.y, b.x - a.x);
    for (const auto& [u, v] : net_.spans) {
      if (u == from || v == from) {
        const Point2 o = net_.poles[u == from ? v : u];
        double diff = std::abs(std::remainder(std::atan2(o.y - a.y, o.x - a.x) - ha,
                                              2 * std::numbers::pi));
        if (diff < kMinBranchAngle) return false;
        // Keep the far end clear of the neighbouring span as well.
        if (geo::PointSegmentDistance(b, a, o) < kSpanClearance) return false;
      } else if (SegmentDistance(a, b, net_.poles[u], net_.poles[v]) < kSpanClearance) {
        return false;
      }
    }
    return true;
  }

  const SceneConfig& c_;
  std::mt19937_64& rng_;
  Network net_;
};

class Canvas {
 public:
  Canvas(int w, int h, const geo::AffineGeoref& g) : img_(w, h, 3, g, 0.0f) {}

  geo::FloatRaster& image() { return img_; }
  Point2 Px(Point2 world) const { return img_.georef().WorldToPixel(world.x, world.y); }

  // Calls fn(c, r) for every pixel whose centre is within `radius` pixels of
  // segment a-b (pixel coordinates).
  template <typename Fn>
  void Stroke(Point2 a, Point2 b, double radius, Fn fn) const {
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius - 1)));
    const int c1 = std::min(img_.width() - 1,
                            static_cast<int>(std::ceil(std::max(a.x, b.x) + radius + 1)));
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius - 1)));
    const int r1 = std::min(img_.height() - 1,
                            static_cast<int>(std::ceil(std::max(a.y, b.y) + radius + 1)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (geo::PointSegmentDistance({c + 0.5, r + 0.5}, a, b) <= radius) fn(c, r);
      }
    }
  }

  void Set(int c, int r, float v) {
    for (int ch = 0; ch < 3; ++ch) img_(c, r, ch) = v;
  }
  void Scale(int c, int r, float f) {
    for (int ch = 0; ch < 3; ++ch) img_(c, r, ch) *= f;
  }

 private:
  geo::FloatRaster img_;
};

std::vector<Point2> PlaceClear(std::mt19937_64& rng, const SceneConfig& c, int count,
                               const Network& net, double clearance) {
  std::vector<Point2> out;
  for (int i = 0; i < count; ++i) {
    for (int attempt = 0; attempt < 30; ++attempt) {
      const Point2 p{Uniform(rng, kMargin, c.extent_x - kMargin),
                     Uniform(rng, kMargin, c.extent_y - kMargin)};
      bool ok = true;
      for (const auto& [u, v] : net.spans) {
        ok &= geo::PointSegmentDistance(p, net.poles[u], net.poles[v]) >= clearance;
      }
      if (ok) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

int PoissonCount(std::mt19937_64& rng, double density_per_ha, const SceneConfig& c) {
  const double mean = density_per_ha * c.extent_x * c.extent_y / 1e4;
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

}  // namespace

void SceneConfig::Validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(name) + " must be positive");
    }
  };
  positive(extent_x, "extent_x");
  positive(extent_y, "extent_y");
  positive(resolution, "resolution");
  positive(spacing_min, "spacing_min");
  if (!(spacing_max >= spacing_min)) throw ValidationError("spacing_max must be >= spacing_min");
  if (branch_count < 0 || max_branch_spans < 1) {
    throw ValidationError("branch_count must be >= 0 and max_branch_spans >= 1");
  }
  if (!(shadow_p_under_5m > 0.0 && shadow_p_under_5m < shadow_p_upto_10m &&
        shadow_p_upto_10m < 1.0)) {
    throw ValidationError("shadow quantiles must satisfy 0 < p5 < p10 < 1");
  }
  if (!(line_visibility >= 0.0 && line_visibility <= 1.0)) {
    throw ValidationError("line_visibility must lie in [0, 1]");
  }
  for (double d : {fence_density, tree_density, lone_pole_density, noise, line_gap_m}) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ValidationError("densities, noise and line_gap_m must be finite and >= 0");
    }
  }
  if (extent_x * extent_y / (resolution * resolution) > 4e8) {
    throw ValidationError("scene would exceed 4e8 pixels");
  }
}

nlohmann::json SceneConfig::ToJson() const {
  return {{"extent_x", extent_x},
          {"extent_y", extent_y},
          {"resolution", resolution},
          {"spacing_min", spacing_min},
          {"spacing_max", spacing_max},
          {"branch_count", branch_count},
          {"max_branch_spans", max_branch_spans},
          {"shadow_azimuth_deg", shadow_azimuth_deg},
          {"shadow_p_under_5m", shadow_p_under_5m},
          {"shadow_p_upto_10m", shadow_p_upto_10m},
          {"line_visibility", line_visibility},
          {"line_gap_m", line_gap_m},
          {"fence_density", fence_density},
          {"tree_density", tree_density},
          {"lone_pole_density", lone_pole_density},
          {"noise", noise},
          {"seed", seed}};
}

SceneConfig SceneConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("scene config must be a JSON object");
  SceneConfig c;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw ValidationError("scene config key '" + key + "' must be a number");
    }
    if (key == "branch_count") {
      c.branch_count = value.get<int>();
    } else if (key == "max_branch_spans") {
      c.max_branch_spans = value.get<int>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else {
      double* fields[] = {&c.extent_x, &c.extent_y, &c.resolution, &c.spacing_min,
                          &c.spacing_max, &c.shadow_azimuth_deg, &c.shadow_p_under_5m,
                          &c.shadow_p_upto_10m, &c.line_visibility, &c.line_gap_m,
                          &c.fence_density, &c.tree_density, &c.lone_pole_density,
                          &c.noise};
      const char* names[] = {"extent_x", "extent_y", "resolution", "spacing_min",
                             "spacing_max", "shadow_azimuth_deg", "shadow_p_under_5m",
                             "shadow_p_upto_10m", "line_visibility", "line_gap_m",
                             "fence_density", "tree_density", "lone_pole_density",
                             "noise"};
      const auto it = std::find_if(std::begin(names), std::end(names),
                                   [&](const char* n) { return key == n; });
      if (it == std::end(names)) throw ValidationError("unknown scene config key '" + key + "'");
      *fields[it - std::begin(names)] = value.get<double>();
    }
  }
  c.Validate();
  return c;
}

ShadowModel ShadowModel::Calibrate(double p_under_5m, double p_upto_10m) {
  if (!(p_under_5m > 0.0 && p_under_5m < p_upto_10m && p_upto_10m < 1.0)) {
    throw ValidationError("shadow quantiles must satisfy 0 < p5 < p10 < 1");
  }
  const boost::math::normal n;
  const double z5 = boost::math::quantile(n, p_under_5m);
  const double z10 = boost::math::quantile(n, p_upto_10m);
  ShadowModel m;
  m.sigma = (std::log(10.0) - std::log(5.0)) / (z10 - z5);
  m.mu = std::log(5.0) - m.sigma * z5;
  return m;
}

double ShadowModel::Cdf(double length) const {
  if (length <= 0.0) return 0.0;
  return boost::math::cdf(boost::math::normal(mu, sigma), std::log(length));
}

double ShadowModel::Sample(std::mt19937_64& rng) const {
  return std::lognormal_distribution<double>(mu, sigma)(rng);
}

Scene GenerateScene(const SceneConfig& config, std::uint64_t seed) {
  config.Validate();
  if (std::max(config.extent_x, config.extent_y) - 2 * kMargin < config.spacing_min) {
    throw ValidationError("scene extent is too small to hold one span");
  }
  Scene s;
  s.config = config;
  s.config.seed = seed;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);

  const Network net = NetworkBuilder(config, rng).Build();
  const int w = static_cast<int>(std::ceil(config.extent_x / config.resolution - 1e-9));
  const int h = static_cast<int>(std::ceil(config.extent_y / config.resolution - 1e-9));
  const auto georef = geo::AffineGeoref::NorthUp(0.0, config.extent_y, config.resolution);

  for (std::size_t i = 0; i < net.poles.size(); ++i) {
    s.poles.points.push_back({static_cast<std::int64_t>(i + 1), net.poles[i],
                              geo::Polarity::kPole, std::nullopt});
  }
  std::bernoulli_distribution visible(config.line_visibility);
  for (std::size_t k = 0; k < net.spans.size(); ++k) {
    const auto [u, v] = net.spans[k];
    s.lines.lines.push_back({static_cast<std::int64_t>(k + 1), {net.poles[u], net.poles[v]},
                             std::nullopt});
    s.edges.emplace_back(std::min(u, v) + 1, std::max(u, v) + 1);
    s.line_visible.push_back(visible(rng));
  }
  for (std::size_t i = 0; i < net.poles.size(); ++i) {
    s.head_radius_px.push_back(Uniform(rng, 1.5, 2.5));
  }

  // Distractors.
  struct Fence {
    Point2 a, b;
    std::vector<Point2> posts;
  };
  std::vector<Fence> fences;
  const int n_fences = PoissonCount(rng, config.fence_density, config);
  for (int i = 0; i < n_fences; ++i) {
    for (int attempt = 0; attempt < 30; ++attempt) {
      const double len = Uniform(rng, 10.0, 30.0);
      const double hd = Uniform(rng, 0.0, 2 * std::numbers::pi);
      const Point2 a{Uniform(rng, kMargin, config.extent_x - kMargin),
                     Uniform(rng, kMargin, config.extent_y - kMargin)};
      const Point2 b{a.x + len * std::cos(hd), a.y + len * std::sin(hd)};
      if (b.x < kMargin || b.y < kMargin || b.x > config.extent_x - kMargin ||
          b.y > config.extent_y - kMargin) {
        continue;
      }
      bool ok = true;
      for (const auto& [u, v] : net.spans) {
        ok &= SegmentDistance(a, b, net.poles[u], net.poles[v]) >= kDistractorClearance;
      }
      if (!ok) continue;
      Fence f{a, b, {}};
      const double step = Uniform(rng, 2.5, 3.5);
      const int n_posts = static_cast<int>(len / step) + 1;
      for (int k = 0; k < n_posts; ++k) {
        const double t = k * step / len;
        f.posts.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      }
      fences.push_back(std::move(f));
      break;
    }
  }
  struct Tree {
    Point2 c;
    double radius, phase;
    int lobes;
  };
  std::vector<Tree> trees;
  for (const Point2& p :
       PlaceClear(rng, config, PoissonCount(rng, config.tree_density, config), net, 5.0)) {
    trees.push_back({p, Uniform(rng, 1.0, 3.0), Uniform(rng, 0.0, 6.3),
                     3 + static_cast<int>(rng() % 4)});
  }
  const std::vector<Point2> lone = PlaceClear(
      rng, config, PoissonCount(rng, config.lone_pole_density, config), net, 5.0);
  std::vector<double> lone_radius;
  for (std::size_t i = 0; i < lone.size(); ++i) lone_radius.push_back(Uniform(rng, 1.5, 2.5));

  std::int64_t neg_id = 1;
  auto add_negative = [&](Point2 p) {
    s.negatives.points.push_back({neg_id++, p, geo::Polarity::kHardNegative, std::nullopt});
  };
  for (const auto& f : fences) {
    for (const auto& p : f.posts) add_negative(p);
  }
  for (const auto& t : trees) add_negative(t.c);
  for (const auto& p : lone) add_negative(p);

  // Background: soil colour plus low-frequency texture.
  Canvas canvas(w, h, georef);
  geo::FloatRaster& img = canvas.image();
  {
    const double cell = 6.0;
    const int cw = std::max(2, static_cast<int>(std::ceil(config.extent_x / cell)) + 1);
    const int ch = std::max(2, static_cast<int>(std::ceil(config.extent_y / cell)) + 1);
    geo::FloatRaster coarse(cw, ch, 1, {}, 0.0f);
    for (auto& v : coarse.data()) v = static_cast<float>(Uniform(rng, -0.06, 0.06));
    const geo::FloatRaster tex = rasterops::BilinearResample(coarse, w, h);
    const float base[3] = {0.52f, 0.45f, 0.36f};
    for (int c = 0; c < 3; ++c) {
      auto dst = img.plane(c);
      const auto src = tex.plane(0);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = base[c] + src[i];
    }
  }
  for (const auto& t : trees) {
    const Point2 pc = canvas.Px(t.c);
    const double rpx = t.radius * 1.2 / config.resolution;
    canvas.Stroke(pc, pc, rpx, [&](int c, int r) {
      const double dx = c + 0.5 - pc.x, dy = r + 0.5 - pc.y;
      const double edge = t.radius / config.resolution *
                          (1.0 + 0.15 * std::sin(t.lobes * std::atan2(dy, dx) + t.phase));
      if (std::hypot(dx, dy) > edge) return;
      img(c, r, 0) = 0.20f;
      img(c, r, 1) = 0.32f;
      img(c, r, 2) = 0.15f;
    });
  }
  const ShadowModel shadow =
      ShadowModel::Calibrate(config.shadow_p_under_5m, config.shadow_p_upto_10m);
  const double az = config.shadow_azimuth_deg * kDeg;
  auto cast_shadow = [&](Point2 p) {
    const double len = shadow.Sample(rng);
    const Point2 end{p.x + len * std::sin(az), p.y + len * std::cos(az)};
    canvas.Stroke(canvas.Px(p), canvas.Px(end), 0.75,
                  [&](int c, int r) { canvas.Scale(c, r, 0.45f); });
  };
  for (const auto& p : net.poles) cast_shadow(p);
  for (const auto& p : lone) cast_shadow(p);
  for (const auto& f : fences) {
    canvas.Stroke(canvas.Px(f.a), canvas.Px(f.b), 0.5,
                  [&](int c, int r) { canvas.Scale(c, r, 0.7f); });
    for (const auto& p : f.posts) {
      const Point2 pc = canvas.Px(p);
      canvas.Stroke(pc, pc, Uniform(rng, 1.0, 1.5), [&](int c, int r) { canvas.Set(c, r, 0.78f); });
    }
  }
  s.line_pixels = geo::ByteRaster(w, h, 1, georef, 0);
  for (std::size_t k = 0; k < net.spans.size(); ++k) {
    const double width = Uniform(rng, 1.0, 2.0);
    if (!s.line_visible[k]) continue;
    const auto [u, v] = net.spans[k];
    const Point2 a = net.poles[u], b = net.poles[v];
    const double len = geo::Distance(a, b);
    const double t = std::min(0.45, config.line_gap_m / len);
    const Point2 a2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    const Point2 b2{b.x - t * (b.x - a.x), b.y - t * (b.y - a.y)};
    canvas.Stroke(canvas.Px(a2), canvas.Px(b2), width / 2, [&](int c, int r) {
      canvas.Set(c, r, 0.16f);
      s.line_pixels(c, r) = 1;
    });
  }
  auto head = [&](Point2 p, double radius) {
    const Point2 pc = canvas.Px(p);
    canvas.Stroke(pc, pc, radius, [&](int c, int r) { canvas.Set(c, r, 0.92f); });
  };
  for (std::size_t i = 0; i < net.poles.size(); ++i) head(net.poles[i], s.head_radius_px[i]);
  for (std::size_t i = 0; i < lone.size(); ++i) head(lone[i], lone_radius[i]);

  s.image = geo::ByteRaster(w, h, 3, georef, 0);
  std::normal_distribution<float> noise(0.0f, static_cast<float>(config.noise));
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    const float v = img.data()[i] + (config.noise > 0 ? noise(rng) : 0.0f);
    s.image.data()[i] =
        static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  }
  return s;
}

OraclePredictions OraclePredict(const Scene& scene, double eps) {
  const int w = scene.image.width(), h = scene.image.height();
  const auto& g = scene.image.georef();
  OraclePredictions out{geo::FloatRaster(w, h, 2, g, 0.0f), geo::FloatRaster(w, h, 1, g, 0.0f)};
  const float lo = static_cast<float>(eps);
  auto bg = out.poles.plane(0);
  auto fg = out.poles.plane(1);
  std::fill(bg.begin(), bg.end(), 1.0f - lo);
  std::fill(fg.begin(), fg.end(), lo);
  for (std::size_t i = 0; i < scene.poles.points.size(); ++i) {
    const Point2 pc = g.WorldToPixel(scene.poles.points[i].position.x,
                                     scene.poles.points[i].position.y);
    const double radius =
        (i < scene.head_radius_px.size() ? scene.head_radius_px[i] : 2.5) + 2.0;
    const int c0 = std::max(0, static_cast<int>(pc.x - radius - 1));
    const int c1 = std::min(w - 1, static_cast<int>(pc.x + radius + 1));
    const int r0 = std::max(0, static_cast<int>(pc.y - radius - 1));
    const int r1 = std::min(h - 1, static_cast<int>(pc.y + radius + 1));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (std::hypot(c + 0.5 - pc.x, r + 0.5 - pc.y) <= radius) {
          out.poles(c, r, 1) = 1.0f - lo;
          out.poles(c, r, 0) = lo;
        }
      }
    }
  }
  if (!scene.line_pixels.data().empty()) {
    for (std::size_t i = 0; i < scene.line_pixels.data().size(); ++i) {
      out.lines.data()[i] = scene.line_pixels.data()[i] ? 1.0f : 0.0f;
    }
  }
  return out;
}

void WriteScene(const Scene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  geo::WriteRaster(scene.image, dir / "image.pgr");
  geo::WriteVectors(scene.poles, dir / "poles.geojson");
  geo::WriteVectors(scene.lines, dir / "lines.geojson");
  geo::WriteVectors(scene.negatives, dir / "negatives.geojson");
  nlohmann::json edges = {{"edges", nlohmann::json::array()},
                          {"visible", nlohmann::json::array()}};
  for (std::size_t k = 0; k < scene.edges.size(); ++k) {
    edges["edges"].push_back({scene.edges[k].first, scene.edges[k].second});
    edges["visible"].push_back(static_cast<bool>(scene.line_visible[k]));
  }
  geo::WriteJsonFile(edges, dir / "edges.json");
  geo::WriteJsonFile(scene.config.ToJson(), dir / "config.json");
}

Scene ReadScene(const std::filesystem::path& dir) {
  Scene s;
  s.config = SceneConfig::FromJson(geo::ReadJsonFile(dir / "config.json"));
  auto raster = geo::ReadRaster(dir / "image.pgr");
  if (!std::holds_alternative<geo::ByteRaster>(raster)) {
    throw ValidationError("scene image must be uint8");
  }
  s.image = std::get<geo::ByteRaster>(std::move(raster));
  s.poles = geo::ReadPoints(dir / "poles.geojson");
  s.lines = geo::ReadPolylines(dir / "lines.geojson");
  s.negatives = geo::ReadPoints(dir / "negatives.geojson");
  const auto edges = geo::ReadJsonFile(dir / "edges.json");
  try {
    for (const auto& e : edges.at("edges")) {
      s.edges.emplace_back(e.at(0).get<std::int64_t>(), e.at(1).get<std::int64_t>());
    }
    for (const auto& v : edges.at("visible")) s.line_visible.push_back(v.get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed edges.json: ") + e.what());
  }
  return s;
}

}  // namespace pgrid::synth
