#include "pgrid/rasterops/thinning.h"

#include <algorithm>
#include <array>
#include <vector>

namespace pgrid::rasterops {

using geo::ByteRaster;

namespace {

// Neighbour order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDc = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDr = {-1, -1, 0, 1, 1, 1, 0, -1};

class Grid {
 public:
  Grid(std::vector<std::uint8_t>& px, int w, int h) : px_(px), w_(w), h_(h) {}

  std::array<std::uint8_t, 8> Ring(int c, int r) const {
    std::array<std::uint8_t, 8> p{};
    for (int k = 0; k < 8; ++k) p[k] = At(c + kDc[k], r + kDr[k]);
    return p;
  }
  std::uint8_t At(int c, int r) const {
    if (c < 0 || r < 0 || c >= w_ || r >= h_) return 0;
    return px_[static_cast<std::size_t>(r) * w_ + c] != 0;
  }

 private:
  std::vector<std::uint8_t>& px_;
  int w_;
  int h_;
};

bool ZhangSuenDeletable(const std::array<std::uint8_t, 8>& p, int pass) {
  int b = 0;
  int a = 0;
  for (int k = 0; k < 8; ++k) {
    b += p[k];
    if (!p[k] && p[(k + 1) % 8]) ++a;
  }
  if (b < 2 || b > 6 || a != 1) return false;
  // Two neighbours side by side in the ring: the tip of a two-pixel-thick
  // diagonal stroke. Treated as an end point, otherwise the stroke is peeled
  // back from its tip one pixel per pass.
  if (b == 2) {
    for (int k = 0; k < 8; ++k) {
      if (p[k] && p[(k + 1) % 8]) return false;
    }
  }
  // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W).
  if (pass == 0) return !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6]);
  return !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6]);
}

// Foreground neighbours form a single 8-connected group inside the 3x3
// window, so deleting the centre cannot split its component.
bool LocallySimple(const std::array<std::uint8_t, 8>& p) {
  int parent[8];
  int count = 0;
  for (int k = 0; k < 8; ++k) parent[k] = k;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < 8; ++i) {
    if (!p[i]) continue;
    ++count;
    for (int j = i + 1; j < 8; ++j) {
      if (!p[j]) continue;
      const int dc = kDc[i] - kDc[j];
      const int dr = kDr[i] - kDr[j];
      if (dc >= -1 && dc <= 1 && dr >= -1 && dr <= 1) {
        const int a = find(i);
        const int b = find(j);
        if (a != b) {
          parent[a] = b;
          --count;
        }
      }
    }
  }
  return count == 1;
}

// Deleting px[idx] keeps its foreground neighbours connected through the rest
// of the image. Falls back to a flood fill when the local test fails.
bool Removable(std::vector<std::uint8_t>& px, const Grid& grid, int w, int h,
               int idx) {
  const int c = idx % w;
  const int r = idx / w;
  if (LocallySimple(grid.Ring(c, r))) return true;
  std::vector<int> targets;
  for (int k = 0; k < 8; ++k) {
    if (grid.At(c + kDc[k], r + kDr[k])) {
      targets.push_back((r + kDr[k]) * w + c + kDc[k]);
    }
  }
  px[idx] = 0;
  std::vector<std::uint8_t> seen(px.size(), 0);
  std::vector<int> stack = {targets.front()};
  seen[targets.front()] = 1;
  std::size_t found = 0;
  while (!stack.empty() && found < targets.size()) {
    const int cur = stack.back();
    stack.pop_back();
    if (std::find(targets.begin(), targets.end(), cur) != targets.end()) {
      ++found;
    }
    const int cc = cur % w;
    const int cr = cur / w;
    for (int k = 0; k < 8; ++k) {
      const int nc = cc + kDc[k];
      const int nr = cr + kDr[k];
      if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
      const int n = nr * w + nc;
      if (px[n] && !seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
    }
  }
  px[idx] = 1;
  return found == targets.size();
}

}  // namespace

ByteRaster Skeletonize(const ByteRaster& mask) {
  if (mask.channels() != 1) {
    throw ShapeError("skeletonize expects a single-channel mask");
  }
  const int w = mask.width();
  const int h = mask.height();
  ByteRaster out(w, h, 1, mask.georef(), 0);
  auto& px = out.data();
  std::vector<int> fg;
  for (std::size_t i = 0; i < mask.data().size(); ++i) {
    if (mask.data()[i]) {
      px[i] = 1;
      fg.push_back(static_cast<int>(i));
    }
  }
  Grid grid(px, w, h);

  std::vector<int> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int idx : fg) {
        if (px[idx] && ZhangSuenDeletable(grid.Ring(idx % w, idx / w), pass)) {
          marked.push_back(idx);
        }
      }
      for (int idx : marked) {
        if (ZhangSuenDeletable(grid.Ring(idx % w, idx / w), pass)) {
          px[idx] = 0;
          changed = true;
        }
      }
      std::erase_if(fg, [&](int idx) { return px[idx] == 0; });
    }
  }

  // Residual 2x2 blocks, e.g. at junctions where every pixel has A > 1. A
  // block survives only when each of its pixels is a cut pixel.
  changed = true;
  while (changed) {
    changed = false;
    for (int idx : fg) {
      if (!px[idx]) continue;
      const int c = idx % w;
      const int r = idx / w;
      if (!(grid.At(c + 1, r) && grid.At(c, r + 1) && grid.At(c + 1, r + 1))) {
        continue;
      }
      const std::array<std::pair<int, int>, 4> block = {
          {{c, r}, {c + 1, r}, {c, r + 1}, {c + 1, r + 1}}};
      for (const auto& [bc, br] : block) {
        if (Removable(px, grid, w, h, br * w + bc)) {
          px[static_cast<std::size_t>(br) * w + bc] = 0;
          changed = true;
          break;
        }
      }
    }
    std::erase_if(fg, [&](int idx) { return px[idx] == 0; });
  }
  return out;
}

bool IsThin(const ByteRaster& mask) {
  const int w = mask.width();
  const int h = mask.height();
  for (int r = 0; r + 1 < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) {
      if (mask(c, r) && mask(c + 1, r) && mask(c, r + 1) &&
          mask(c + 1, r + 1)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace pgrid::rasterops
