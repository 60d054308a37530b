#include "pgrid/rasterops/components.h"

#include <algorithm>

namespace pgrid::rasterops {

using geo::ByteRaster;
using geo::FloatRaster;
using geo::LabelRaster;

BlobLabels ConnectedComponents(const ByteRaster& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw ShapeError("connectivity must be 4 or 8");
  }
  if (mask.channels() != 1) {
    throw ShapeError("connected components expects a single-channel mask");
  }
  const int w = mask.width();
  const int h = mask.height();
  BlobLabels out;
  out.labels = LabelRaster(w, h, 1, mask.georef(), 0);
  auto& labels = out.labels.data();
  const auto& m = mask.data();

  static constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  std::vector<int> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t start = static_cast<std::size_t>(r) * w + c;
      if (!m[start] || labels[start]) continue;
      const int label = ++out.blob_count;
      BlobStats st{0, c, r, c, r, 0};
      labels[start] = label;
      stack.assign(1, static_cast<int>(start));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int pc = idx % w;
        const int pr = idx / w;
        ++st.area;
        st.min_col = std::min(st.min_col, pc);
        st.max_col = std::max(st.max_col, pc);
        st.min_row = std::min(st.min_row, pr);
        st.max_row = std::max(st.max_row, pr);
        for (int k = 0; k < connectivity; ++k) {
          const int nc = pc + kDc[k];
          const int nr = pr + kDr[k];
          if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
          const std::size_t n = static_cast<std::size_t>(nr) * w + nc;
          if (m[n] && !labels[n]) {
            labels[n] = label;
            stack.push_back(static_cast<int>(n));
          }
        }
      }
      out.stats.push_back(st);
    }
  }
  return out;
}

void CountAnnotations(BlobLabels& blobs,
                      std::span<const geo::PixelPoint> points) {
  for (auto& st : blobs.stats) st.annotation_count = 0;
  for (const auto& p : points) {
    if (!blobs.labels.Contains(p.col, p.row)) continue;
    const int label = blobs.labels(p.col, p.row);
    if (label > 0) ++blobs.stats[label - 1].annotation_count;
  }
}

ByteRaster Threshold(const FloatRaster& raster, int channel, float threshold) {
  ByteRaster out(raster.width(), raster.height(), 1, raster.georef(), 0);
  const auto src = raster.plane(channel);
  auto& dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= threshold;
  return out;
}

}  // namespace pgrid::rasterops
