#include "pgrid/rasterops/resample.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pgrid::rasterops {

namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> Taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    const double s =
        std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(s));
    taps[i] = {lo, std::min(lo + 1, in - 1), s - lo};
  }
  return taps;
}

}  // namespace

geo::FloatRaster BilinearResample(const geo::FloatRaster& src, int out_width,
                                  int out_height) {
  if (out_width <= 0 || out_height <= 0) {
    throw ShapeError("resample target must be at least 1x1");
  }
  if (src.width() == 0 || src.height() == 0) {
    throw ShapeError("cannot resample an empty raster");
  }
  geo::AffineGeoref g = src.georef();
  const double sx = static_cast<double>(src.width()) / out_width;
  const double sy = static_cast<double>(src.height()) / out_height;
  g.px_w *= sx;
  g.rot_y *= sx;
  g.rot_x *= sy;
  g.px_h *= sy;

  geo::FloatRaster out(out_width, out_height, src.channels(), g, 0.0f);
  const auto tx = Taps(src.width(), out_width);
  const auto ty = Taps(src.height(), out_height);
  for (int ch = 0; ch < src.channels(); ++ch) {
    for (int r = 0; r < out_height; ++r) {
      const Tap& y = ty[r];
      for (int c = 0; c < out_width; ++c) {
        const Tap& x = tx[c];
        const double top = src(x.lo, y.lo, ch) * (1.0 - x.frac) +
                           src(x.hi, y.lo, ch) * x.frac;
        const double bottom = src(x.lo, y.hi, ch) * (1.0 - x.frac) +
                              src(x.hi, y.hi, ch) * x.frac;
        out(c, r, ch) = static_cast<float>(top * (1.0 - y.frac) + bottom * y.frac);
      }
    }
  }
  out.set_nodata(src.nodata());
  return out;
}

}  // namespace pgrid::rasterops
