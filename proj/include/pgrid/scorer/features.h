#ifndef PGRID_SCORER_FEATURES_H_
#define PGRID_SCORER_FEATURES_H_

#include "pgrid/geo/types.h"

namespace pgrid::scorer {

inline constexpr int kFeatureBankVersion = 1;
inline constexpr int kFeaturesPerChannel = 6;

// Fixed feature bank. For each image channel c, in order, channels
// 6c .. 6c+5 of the output hold:
//   0 raw value
//   1 Gaussian blur, sigma 1 px
//   2 Gaussian blur, sigma 2 px
//   3 Gaussian blur, sigma 4 px
//   4 Sobel gradient magnitude / 8
//   5 standard deviation over the 5x5 window
// Gaussian kernels have radius ceil(3 sigma) and unit sum. Borders use
// reflect-101 padding (... 2 1 | 0 1 2 ... n-1 | n-2 ...).
geo::FloatRaster ExtractFeatures(const geo::FloatRaster& image);

int FeatureCount(int image_channels);

// Normalized 1-D Gaussian taps for offsets -radius..radius.
std::vector<double> GaussianKernel(double sigma);

}  // namespace pgrid::scorer

#endif  // PGRID_SCORER_FEATURES_H_
