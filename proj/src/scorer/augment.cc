#include "pgrid/scorer/augment.h"

#include "pgrid/scorer/features.h"

namespace pgrid::scorer {

bool Augmentation::IsIdentity() const {
  if (flip_h || flip_v || rot90 % 4 != 0) return false;
  for (double g : gains) {
    if (g != 1.0) return false;
  }
  return true;
}

Augmentation SampleAugmentation(std::mt19937_64& rng, int image_channels) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> quarter(0, 3);
  std::uniform_real_distribution<double> gain(0.9, 1.1);
  Augmentation a;
  a.flip_h = coin(rng);
  a.flip_v = coin(rng);
  a.rot90 = quarter(rng);
  for (int c = 0; c < image_channels; ++c) a.gains.push_back(gain(rng));
  return a;
}

std::pair<int, int> AugmentedSize(const Augmentation& a, int w, int h) {
  return (a.rot90 % 2) ? std::pair{h, w} : std::pair{w, h};
}

geo::PixelPoint TransformPoint(const geo::PixelPoint& p, const Augmentation& a,
                               int w, int h) {
  int c = a.flip_h ? w - 1 - p.col : p.col;
  int r = a.flip_v ? h - 1 - p.row : p.row;
  for (int k = 0; k < ((a.rot90 % 4) + 4) % 4; ++k) {
    const int nc = h - 1 - r;
    const int nr = c;
    c = nc;
    r = nr;
    std::swap(w, h);
  }
  return {p.id, c, r};
}

geo::FloatRaster AugmentImage(const geo::FloatRaster& image,
                              const Augmentation& a) {
  geo::FloatRaster out = TransformGeometry(image, a);
  for (int ch = 0; ch < out.channels() && ch < static_cast<int>(a.gains.size());
       ++ch) {
    for (float& v : out.plane(ch)) v = static_cast<float>(v * a.gains[ch]);
  }
  return out;
}

geo::FloatRaster AugmentFeatures(const geo::FloatRaster& features,
                                 const Augmentation& a) {
  geo::FloatRaster out = TransformGeometry(features, a);
  for (int f = 0; f < out.channels(); ++f) {
    const std::size_t ch = f / kFeaturesPerChannel;
    if (ch >= a.gains.size()) continue;
    for (float& v : out.plane(f)) v = static_cast<float>(v * a.gains[ch]);
  }
  return out;
}

}  // namespace pgrid::scorer
