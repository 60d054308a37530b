#ifndef PGRID_SCORER_MODEL_H_
#define PGRID_SCORER_MODEL_H_

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgrid/geo/types.h"

namespace pgrid::scorer {

// Per-pixel affine map from F features to 2 class logits (background, pole
// or line). W is stored row-major as F x 2: w[2 * f + k].
struct ScorerWeights {
  int feature_bank_version = 1;
  int num_features = 0;
  std::vector<double> w;
  std::array<double, 2> b = {0.0, 0.0};
  nlohmann::json metadata = nlohmann::json::object();

  static ScorerWeights Zeros(int num_features);

  double W(int f, int k) const { return w[2 * f + k]; }
  double& W(int f, int k) { return w[2 * f + k]; }

  // Throws ValidationError on wrong sizes or non-finite values.
  void Validate() const;
  nlohmann::json ToJson() const;
  static ScorerWeights FromJson(const nlohmann::json& j);

  bool operator==(const ScorerWeights&) const = default;
};

ScorerWeights ReadWeights(const std::string& path);
void WriteWeights(const std::string& path, const ScorerWeights& weights);

// logits(c, r, k) = b[k] + sum_f W(f, k) * features(c, r, f).
geo::DoubleRaster Score(const geo::FloatRaster& features,
                        const ScorerWeights& weights);

// Score followed by the per-pixel softmax.
geo::DoubleRaster Predict(const geo::FloatRaster& features,
                          const ScorerWeights& weights);

// Gradient of a scalar loss with respect to W and b, given dL/dlogits.
struct WeightGrad {
  std::vector<double> w;
  std::array<double, 2> b = {0.0, 0.0};
};
WeightGrad BackpropLogits(const geo::FloatRaster& features,
                          const geo::DoubleRaster& grad_logits);

}  // namespace pgrid::scorer

#endif  // PGRID_SCORER_MODEL_H_
