#include "pgrid/scorer/features.h"

#include <cmath>
#include <span>
#include <vector>

namespace pgrid::scorer {

namespace {

int Reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

using Plane = std::vector<double>;

// Separable correlation with a symmetric kernel.
Plane Separable(const Plane& src, int w, int h, const std::vector<double>& kx,
                const std::vector<double>& ky) {
  const int rx = static_cast<int>(kx.size()) / 2;
  const int ry = static_cast<int>(ky.size()) / 2;
  Plane tmp(src.size()), out(src.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -rx; k <= rx; ++k) s += kx[k + rx] * src[r * w + Reflect(c + k, w)];
      tmp[r * w + c] = s;
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -ry; k <= ry; ++k) s += ky[k + ry] * tmp[Reflect(r + k, h) * w + c];
      out[r * w + c] = s;
    }
  }
  return out;
}

// Population standard deviation over the 5x5 window, two-pass so constant
// regions give exactly 0.
Plane LocalStd(const Plane& src, const Plane& mean, int w, int h) {
  Plane out(src.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double m = mean[r * w + c];
      double s = 0.0;
      for (int dr = -2; dr <= 2; ++dr) {
        const int rr = Reflect(r + dr, h) * w;
        for (int dc = -2; dc <= 2; ++dc) {
          const double d = src[rr + Reflect(c + dc, w)] - m;
          s += d * d;
        }
      }
      out[r * w + c] = std::sqrt(s / 25.0);
    }
  }
  return out;
}

}  // namespace

std::vector<double> GaussianKernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

int FeatureCount(int image_channels) {
  return kFeaturesPerChannel * image_channels;
}

geo::FloatRaster ExtractFeatures(const geo::FloatRaster& image) {
  if (image.channels() < 1) {
    throw ShapeError("feature extraction needs at least one image channel");
  }
  const int w = image.width();
  const int h = image.height();
  geo::FloatRaster out(w, h, FeatureCount(image.channels()), image.georef(), 0.0f);
  const std::vector<double> g1 = GaussianKernel(1.0);
  const std::vector<double> g2 = GaussianKernel(2.0);
  const std::vector<double> g4 = GaussianKernel(4.0);
  const std::vector<double> smooth = {1.0, 2.0, 1.0};
  const std::vector<double> diff = {-1.0, 0.0, 1.0};
  const std::vector<double> box(5, 1.0 / 5.0);

  for (int ch = 0; ch < image.channels(); ++ch) {
    const auto src = image.plane(ch);
    const Plane raw(src.begin(), src.end());

    const Plane b1 = Separable(raw, w, h, g1, g1);
    const Plane b2 = Separable(raw, w, h, g2, g2);
    const Plane b4 = Separable(raw, w, h, g4, g4);
    const Plane gx = Separable(raw, w, h, diff, smooth);
    const Plane gy = Separable(raw, w, h, smooth, diff);
    const Plane mean = Separable(raw, w, h, box, box);
    const Plane sd = LocalStd(raw, mean, w, h);

    const int base = ch * kFeaturesPerChannel;
    auto put = [&](int k, std::size_t i, double v) {
      out.plane(base + k)[i] = static_cast<float>(v);
    };
    for (std::size_t i = 0; i < raw.size(); ++i) {
      put(0, i, raw[i]);
      put(1, i, b1[i]);
      put(2, i, b2[i]);
      put(3, i, b4[i]);
      put(4, i, std::hypot(gx[i], gy[i]) / 8.0);
      put(5, i, sd[i]);
    }
  }
  return out;
}

}  // namespace pgrid::scorer
