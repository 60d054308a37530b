#include "pgrid/rasterops/watershed.h"

#include <functional>
#include <queue>
#include <utility>
#include <vector>

namespace pgrid::rasterops {

using geo::ByteRaster;
using geo::FloatRaster;
using geo::LabelRaster;

namespace {

constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

enum : std::uint8_t { kUnseen = 0, kQueued = 1, kDone = 2 };

}  // namespace

WatershedResult Watershed(const FloatRaster& topography,
                          std::span<const geo::PixelPoint> seeds,
                          const ByteRaster& region_mask) {
  const int w = topography.width();
  const int h = topography.height();
  if (region_mask.width() != w || region_mask.height() != h ||
      region_mask.channels() != 1 || topography.channels() != 1) {
    throw ShapeError("watershed expects single-channel rasters of equal size");
  }
  WatershedResult out{LabelRaster(w, h, 1, topography.georef(), 0),
                      ByteRaster(w, h, 1, topography.georef(), 0)};
  auto& labels = out.regions.data();
  auto& ridge = out.ridge.data();
  const auto& mask = region_mask.data();
  const auto& topo = topography.data();
  std::vector<std::uint8_t> state(static_cast<std::size_t>(w) * h, kUnseen);

  using Entry = std::pair<float, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto& s = seeds[k];
    if (!region_mask.Contains(s.col, s.row) || !region_mask(s.col, s.row)) {
      throw ValidationError("watershed seed " + std::to_string(s.id) +
                            " lies outside the region mask");
    }
    const int idx = s.row * w + s.col;
    if (labels[idx] != 0) {
      throw ValidationError("watershed seed " + std::to_string(s.id) +
                            " duplicates the pixel of another seed");
    }
    labels[idx] = static_cast<int>(k) + 1;
    state[idx] = kQueued;
    queue.emplace(topo[idx], idx);
  }

  while (!queue.empty()) {
    const int idx = queue.top().second;
    queue.pop();
    const int c = idx % w;
    const int r = idx / w;
    state[idx] = kDone;
    if (labels[idx] == 0) {
      int found = 0;
      bool conflict = false;
      for (int k = 0; k < 8; ++k) {
        const int nc = c + kDc[k];
        const int nr = r + kDr[k];
        if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
        const int l = labels[nr * w + nc];
        if (l == 0) continue;
        if (found == 0) {
          found = l;
        } else if (l != found) {
          conflict = true;
        }
      }
      if (conflict) {
        ridge[idx] = 1;
        continue;
      }
      labels[idx] = found;
    }
    for (int k = 0; k < 8; ++k) {
      const int nc = c + kDc[k];
      const int nr = r + kDr[k];
      if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
      const int n = nr * w + nc;
      if (!mask[n] || state[n] != kUnseen) continue;
      state[n] = kQueued;
      queue.emplace(topo[n], n);
    }
  }

  // Pockets enclosed by ridge pixels are never reached by the flood.
  std::vector<int> stack;
  for (int idx = 0; idx < w * h; ++idx) {
    if (ridge[idx]) stack.push_back(idx);
  }
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const int c = idx % w;
    const int r = idx / w;
    for (int k = 0; k < 8; ++k) {
      const int nc = c + kDc[k];
      const int nr = r + kDr[k];
      if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
      const int n = nr * w + nc;
      if (mask[n] && labels[n] == 0 && !ridge[n]) {
        ridge[n] = 1;
        stack.push_back(n);
      }
    }
  }
  return out;
}

}  // namespace pgrid::rasterops
