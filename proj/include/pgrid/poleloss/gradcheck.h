#ifndef PGRID_POLELOSS_GRADCHECK_H_
#define PGRID_POLELOSS_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pgrid/poleloss/loss.h"

namespace pgrid::poleloss {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Coordinates whose perturbation changed the discrete structure.
  std::size_t skipped = 0;
};

// |a - n| / max(|a|, |n|, floor).
double RelativeError(double analytic, double numeric, double floor = 1e-6);

// Central differences of a scalar function over every coordinate of `x`.
// `eval(x, &stable)` returns the value and sets `stable` to false when the
// perturbed point has different discrete structure from the unperturbed one;
// such coordinates are skipped.
GradCheckReport CheckGradient(
    std::vector<double> x, std::span<const double> analytic, double h,
    const std::function<double(const std::vector<double>&, bool*)>& eval);

// Finite-difference check of CompositeLoss().grad_logits.
GradCheckReport CheckCompositeGradient(const geo::DoubleRaster& logits,
                                       std::span<const geo::PixelPoint> poles,
                                       std::span<const geo::PixelPoint> negatives,
                                       const LossConfig& config, double h = 1e-4);

struct GradFixture {
  geo::DoubleRaster logits;
  std::vector<geo::PixelPoint> poles;
  std::vector<geo::PixelPoint> negatives;
};

// size x size logits with 0-4 poles and 0-4 hard negatives at random pixels,
// smooth pole bumps at the poles and at two extra spots, and noise, so that
// blobs, splits and false positives all occur.
GradFixture RandomGradFixture(std::mt19937_64& rng, int size);

}  // namespace pgrid::poleloss

#endif  // PGRID_POLELOSS_GRADCHECK_H_
