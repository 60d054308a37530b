#ifndef PGRID_SCORER_AUGMENT_H_
#define PGRID_SCORER_AUGMENT_H_

#include <random>
#include <vector>

#include "pgrid/geo/types.h"

namespace pgrid::scorer {

// Flip horizontally, then vertically, then rotate clockwise by
// 90 * rot90 degrees; image channel c is multiplied by gains[c].
struct Augmentation {
  bool flip_h = false;
  bool flip_v = false;
  int rot90 = 0;
  std::vector<double> gains;

  bool IsIdentity() const;
};

// Uniform over flips and rotations, gains uniform in [0.9, 1.1].
Augmentation SampleAugmentation(std::mt19937_64& rng, int image_channels);

// Size of a w x h raster after the geometric part.
std::pair<int, int> AugmentedSize(const Augmentation& a, int w, int h);

// Where pixel (col, row) of a w x h raster lands.
geo::PixelPoint TransformPoint(const geo::PixelPoint& p, const Augmentation& a,
                               int w, int h);

// Geometric part only, applied to every channel. The georef is reset to the
// identity because the result is no longer north-up.
template <typename T>
geo::Raster<T> TransformGeometry(const geo::Raster<T>& src,
                                 const Augmentation& a) {
  const auto [ow, oh] = AugmentedSize(a, src.width(), src.height());
  geo::Raster<T> out(ow, oh, src.channels(), geo::AffineGeoref{}, T{});
  for (int r = 0; r < src.height(); ++r) {
    for (int c = 0; c < src.width(); ++c) {
      const geo::PixelPoint q =
          TransformPoint({0, c, r}, a, src.width(), src.height());
      for (int ch = 0; ch < src.channels(); ++ch) {
        out(q.col, q.row, ch) = src(c, r, ch);
      }
    }
  }
  return out;
}

// Geometry plus per-channel gain on an image.
geo::FloatRaster AugmentImage(const geo::FloatRaster& image,
                              const Augmentation& a);

// The same augmentation expressed on ExtractFeatures() output. Every feature
// in the bank commutes with flips and quarter turns and scales linearly with
// a channel gain, so this equals ExtractFeatures(AugmentImage(image, a)) up
// to float rounding.
geo::FloatRaster AugmentFeatures(const geo::FloatRaster& features,
                                 const Augmentation& a);

}  // namespace pgrid::scorer

#endif  // PGRID_SCORER_AUGMENT_H_
