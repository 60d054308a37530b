#include "pipeline.h"

namespace pgrid::pipeline {

geo::FloatRaster NormalizeImage(const geo::ByteRaster& image) {
  geo::FloatRaster out(image.width(), image.height(), image.channels(), image.georef(), 0.0f);
  for (std::size_t i = 0; i < image.data().size(); ++i) {
    out.data()[i] = static_cast<float>(image.data()[i]) / 255.0f;
  }
  return out;
}

geo::FloatRaster ToFloat(const geo::DoubleRaster& raster) {
  geo::FloatRaster out(raster.width(), raster.height(), raster.channels(), raster.georef(),
                       0.0f);
  for (std::size_t i = 0; i < raster.data().size(); ++i) {
    out.data()[i] = static_cast<float>(raster.data()[i]);
  }
  return out;
}

scorer::PoleSample PoleSampleFromScene(const synth::Scene& scene) {
  const auto& img = scene.image;
  scorer::PoleSample s;
  s.image = NormalizeImage(img);
  s.poles = geo::ToPixelPoints(scene.poles, geo::Polarity::kPole, img.georef(), img.width(),
                               img.height());
  s.negatives = geo::ToPixelPoints(scene.negatives, geo::Polarity::kHardNegative,
                                   img.georef(), img.width(), img.height());
  return s;
}

lineseg::LineSample LineSampleFromScene(const synth::Scene& scene) {
  return {NormalizeImage(scene.image), scene.lines};
}

geo::FloatRaster DetectPoleMap(const geo::ByteRaster& image,
                               const scorer::ScorerWeights& weights) {
  return ToFloat(scorer::DetectPoles(NormalizeImage(image), weights));
}

}  // namespace pgrid::pipeline
