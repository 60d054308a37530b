#ifndef PGRID_TOOLS_PIPELINE_H_
#define PGRID_TOOLS_PIPELINE_H_

#include <vector>

#include "pgrid/geo/types.h"
#include "pgrid/lineseg/lineseg.h"
#include "pgrid/scorer/train.h"
#include "pgrid/synth/synth.h"

// Glue shared by the command-line tool and the acceptance runner.
namespace pgrid::pipeline {

// uint8 image scaled to [0, 1].
geo::FloatRaster NormalizeImage(const geo::ByteRaster& image);
geo::FloatRaster ToFloat(const geo::DoubleRaster& raster);

scorer::PoleSample PoleSampleFromScene(const synth::Scene& scene);
lineseg::LineSample LineSampleFromScene(const synth::Scene& scene);

// Pole probability map of a trained scorer, as float32 for extraction and IO.
geo::FloatRaster DetectPoleMap(const geo::ByteRaster& image,
                               const scorer::ScorerWeights& weights);

}  // namespace pgrid::pipeline

#endif  // PGRID_TOOLS_PIPELINE_H_
