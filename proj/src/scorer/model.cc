#include "pgrid/scorer/model.h"

#include <cmath>

#include "pgrid/geo/vector_io.h"
#include "pgrid/poleloss/loss.h"
#include "pgrid/scorer/features.h"

namespace pgrid::scorer {

ScorerWeights ScorerWeights::Zeros(int num_features) {
  ScorerWeights s;
  s.feature_bank_version = kFeatureBankVersion;
  s.num_features = num_features;
  s.w.assign(2 * static_cast<std::size_t>(num_features), 0.0);
  return s;
}

void ScorerWeights::Validate() const {
  if (num_features < 0 ||
      w.size() != 2 * static_cast<std::size_t>(num_features)) {
    throw ValidationError("weight matrix must hold num_features x 2 values");
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw ValidationError("non-finite weight");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw ValidationError("non-finite bias");
  }
}

nlohmann::json ScorerWeights::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int f = 0; f < num_features; ++f) rows.push_back({W(f, 0), W(f, 1)});
  return {{"feature_bank_version", feature_bank_version},
          {"W", rows},
          {"b", {b[0], b[1]}},
          {"metadata", metadata}};
}

ScorerWeights ScorerWeights::FromJson(const nlohmann::json& j) {
  try {
    ScorerWeights s;
    s.feature_bank_version = j.at("feature_bank_version").get<int>();
    if (s.feature_bank_version != kFeatureBankVersion) {
      throw ValidationError("unsupported feature_bank_version " +
                            std::to_string(s.feature_bank_version));
    }
    const auto& rows = j.at("W");
    s.num_features = static_cast<int>(rows.size());
    for (const auto& row : rows) {
      if (row.size() != 2) throw ValidationError("each W row needs 2 values");
      s.w.push_back(row[0].get<double>());
      s.w.push_back(row[1].get<double>());
    }
    const auto& b = j.at("b");
    if (b.size() != 2) throw ValidationError("b needs 2 values");
    s.b = {b[0].get<double>(), b[1].get<double>()};
    if (j.contains("metadata")) s.metadata = j.at("metadata");
    s.Validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed weights: ") + e.what());
  }
}

ScorerWeights ReadWeights(const std::string& path) {
  return ScorerWeights::FromJson(geo::ReadJsonFile(path));
}

void WriteWeights(const std::string& path, const ScorerWeights& weights) {
  geo::WriteJsonFile(weights.ToJson(), path);
}

geo::DoubleRaster Score(const geo::FloatRaster& features,
                        const ScorerWeights& weights) {
  if (features.channels() != weights.num_features) {
    throw ShapeError("feature raster has " +
                     std::to_string(features.channels()) +
                     " channels but the weights expect " +
                     std::to_string(weights.num_features));
  }
  geo::DoubleRaster z(features.width(), features.height(), 2,
                      features.georef(), 0.0);
  for (int k = 0; k < 2; ++k) {
    auto out = z.plane(k);
    std::fill(out.begin(), out.end(), weights.b[k]);
    for (int f = 0; f < weights.num_features; ++f) {
      const double wf = weights.W(f, k);
      if (wf == 0.0) continue;
      const auto in = features.plane(f);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += wf * in[i];
    }
  }
  return z;
}

geo::DoubleRaster Predict(const geo::FloatRaster& features,
                          const ScorerWeights& weights) {
  return poleloss::Softmax(Score(features, weights));
}

WeightGrad BackpropLogits(const geo::FloatRaster& features,
                          const geo::DoubleRaster& grad_logits) {
  if (!features.SameGrid(grad_logits) || grad_logits.channels() != 2) {
    throw ShapeError("logit gradient does not match the feature grid");
  }
  const int nf = features.channels();
  WeightGrad g;
  g.w.assign(2 * static_cast<std::size_t>(nf), 0.0);
  for (int k = 0; k < 2; ++k) {
    const auto dz = grad_logits.plane(k);
    double sb = 0.0;
    for (double v : dz) sb += v;
    g.b[k] = sb;
    for (int f = 0; f < nf; ++f) {
      const auto in = features.plane(f);
      double s = 0.0;
      for (std::size_t i = 0; i < dz.size(); ++i) s += in[i] * dz[i];
      g.w[2 * f + k] = s;
    }
  }
  return g;
}

}  // namespace pgrid::scorer
