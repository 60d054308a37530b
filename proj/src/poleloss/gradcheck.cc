#include "pgrid/poleloss/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace pgrid::poleloss {

double RelativeError(double analytic, double numeric, double floor) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport CheckGradient(
    std::vector<double> x, std::span<const double> analytic, double h,
    const std::function<double(const std::vector<double>&, bool*)>& eval) {
  if (analytic.size() != x.size()) {
    throw ShapeError("analytic gradient length differs from parameter count");
  }
  GradCheckReport report;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    bool stable_plus = true;
    bool stable_minus = true;
    x[i] = saved + h;
    const double plus = eval(x, &stable_plus);
    x[i] = saved - h;
    const double minus = eval(x, &stable_minus);
    x[i] = saved;
    if (!stable_plus || !stable_minus) {
      ++report.skipped;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * h);
    report.max_rel_error =
        std::max(report.max_rel_error, RelativeError(analytic[i], numeric));
    ++report.checked;
  }
  return report;
}

GradCheckReport CheckCompositeGradient(const geo::DoubleRaster& logits,
                                       std::span<const geo::PixelPoint> poles,
                                       std::span<const geo::PixelPoint> negatives,
                                       const LossConfig& config, double h) {
  const LossBreakdown base = CompositeLoss(logits, poles, negatives, config);
  geo::DoubleRaster work = logits;
  return CheckGradient(
      logits.data(), base.grad_logits.data(), h,
      [&](const std::vector<double>& x, bool* stable) {
        work.data() = x;
        const LossBreakdown b = CompositeLoss(work, poles, negatives, config);
        *stable = b.structure == base.structure;
        return b.total;
      });
}

GradFixture RandomGradFixture(std::mt19937_64& rng, int size) {
  if (size < 1) throw ValidationError("fixture size must be positive");
  std::uniform_int_distribution<int> pos(0, size - 1), count(0, 4);
  std::normal_distribution<double> noise(0.0, 1.0);
  GradFixture f;
  f.logits = geo::DoubleRaster(size, size, 2, {}, 0.0);
  const int np = count(rng);
  const int nn = count(rng);
  for (int i = 0; i < np; ++i) f.poles.push_back({i, pos(rng), pos(rng)});
  for (int i = 0; i < nn; ++i) f.negatives.push_back({100 + i, pos(rng), pos(rng)});
  std::vector<std::pair<double, double>> bumps;
  for (const auto& p : f.poles) bumps.push_back({p.col, p.row});
  for (int i = 0; i < 2; ++i) bumps.push_back({pos(rng), pos(rng)});
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double v = -2.0 + 0.5 * noise(rng);
      for (const auto& [bc, br] : bumps) {
        v += 4.0 * std::exp(-((c - bc) * (c - bc) + (r - br) * (r - br)) / 6.0);
      }
      f.logits(c, r, kPole) = v;
      f.logits(c, r, kBackground) = 0.3 * noise(rng);
    }
  }
  return f;
}

}  // namespace pgrid::poleloss
