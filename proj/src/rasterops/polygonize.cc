#include "pgrid/rasterops/polygonize.h"

#include <algorithm>
#include <array>
#include <set>
#include <utility>
#include <vector>

#include "pgrid/rasterops/components.h"
#include "pgrid/rasterops/thinning.h"

namespace pgrid::rasterops {

using geo::ByteRaster;
using geo::Point2;

namespace {

struct Corner {
  int x;
  int y;
  bool operator==(const Corner&) const = default;
};

// Directions in pixel space (row axis pointing down): E, S, W, N.
constexpr std::array<int, 4> kDx = {1, 0, -1, 0};
constexpr std::array<int, 4> kDy = {0, 1, 0, -1};

double SignedArea(const std::vector<Point2>& ring) {
  double a = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point2& p = ring[i];
    const Point2& q = ring[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

// Crack-follows the blob with the interior on the right-hand side, starting
// at the top-left corner of its first pixel.
std::vector<Corner> TraceOuter(const geo::LabelRaster& labels, int label,
                               int c0, int r0) {
  auto inside = [&](int c, int r) {
    return labels.Contains(c, r) && labels(c, r) == label;
  };
  // Pixel touching corner (x, y) in quadrant (sx, sy).
  auto quad = [&](int x, int y, int sx, int sy) {
    return inside(sx > 0 ? x : x - 1, sy > 0 ? y : y - 1);
  };
  const Corner start{c0, r0};
  std::vector<Corner> out = {start};
  Corner v = start;
  int d = 0;
  while (true) {
    v.x += kDx[d];
    v.y += kDy[d];
    if (v == start) break;
    // Right normal of (dx, dy) in a y-down frame is (-dy, dx).
    const int rx = -kDy[d], ry = kDx[d];
    const bool left_ahead = quad(v.x, v.y, kDx[d] - rx, kDy[d] - ry);
    const bool right_ahead = quad(v.x, v.y, kDx[d] + rx, kDy[d] + ry);
    int nd = d;
    if (left_ahead) {
      nd = (d + 3) % 4;
    } else if (!right_ahead) {
      nd = (d + 1) % 4;
    }
    if (nd != d) out.push_back(v);
    d = nd;
  }
  return out;
}

constexpr std::array<int, 8> kNc = {1, 0, -1, 0, 1, -1, -1, 1};
constexpr std::array<int, 8> kNr = {0, 1, 0, -1, 1, 1, -1, -1};

class SkeletonGraph {
 public:
  explicit SkeletonGraph(const ByteRaster& s)
      : s_(s), w_(s.width()), h_(s.height()) {}

  bool On(int c, int r) const {
    return c >= 0 && r >= 0 && c < w_ && r < h_ && s_(c, r) != 0;
  }

  // Linked neighbours as pixel indices, in a fixed order.
  std::vector<int> Links(int idx) const {
    const int c = idx % w_;
    const int r = idx / w_;
    std::vector<int> out;
    for (int k = 0; k < 8; ++k) {
      const int nc = c + kNc[k];
      const int nr = r + kNr[k];
      if (!On(nc, nr)) continue;
      if (k >= 4 && (On(nc, r) || On(c, nr))) continue;
      out.push_back(nr * w_ + nc);
    }
    return out;
  }

  int width() const { return w_; }

 private:
  const ByteRaster& s_;
  int w_;
  int h_;
};

bool Collinear(int a, int b, int c, int w) {
  const long ax = a % w, ay = a / w, bx = b % w, by = b / w, cx = c % w,
             cy = c / w;
  return (bx - ax) * (cy - ay) == (by - ay) * (cx - ax);
}

}  // namespace

geo::PolygonSet Polygonize(const ByteRaster& mask) {
  if (mask.channels() != 1) {
    throw ShapeError("polygonize expects a single-channel mask");
  }
  const BlobLabels blobs = ConnectedComponents(mask, 8);
  geo::PolygonSet out;
  out.epsg = mask.georef().epsg;
  std::vector<bool> seen(blobs.blob_count + 1, false);
  const geo::AffineGeoref& g = mask.georef();
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      const int label = blobs.labels(c, r);
      if (label == 0 || seen[label]) continue;
      seen[label] = true;
      geo::Polygon poly;
      poly.id = label;
      for (const Corner& k : TraceOuter(blobs.labels, label, c, r)) {
        poly.ring.push_back(g.PixelToWorld(k.x, k.y));
      }
      if (SignedArea(poly.ring) < 0.0) {
        std::reverse(poly.ring.begin(), poly.ring.end());
      }
      out.polygons.push_back(std::move(poly));
    }
  }
  return out;
}

ByteRaster PruneSpurs(const ByteRaster& skeleton, int max_length) {
  if (skeleton.channels() != 1) throw ShapeError("skeleton must be single-channel");
  ByteRaster out = skeleton;
  if (max_length <= 0) return out;
  const int w = out.width();
  for (bool changed = true; changed;) {
    changed = false;
    const SkeletonGraph graph(out);
    std::vector<int> doomed;
    for (int idx = 0; idx < w * out.height(); ++idx) {
      if (!out.data()[idx] || graph.Links(idx).size() != 1) continue;
      std::vector<int> path = {idx};
      int prev = -1;
      int cur = idx;
      for (;;) {
        const auto links = graph.Links(cur);
        if (links.size() >= 3) {
          path.pop_back();  // keep the junction
          if (static_cast<int>(path.size()) <= max_length) {
            doomed.insert(doomed.end(), path.begin(), path.end());
          }
          break;
        }
        if (static_cast<int>(path.size()) > max_length) break;
        int next = -1;
        for (int n : links) {
          if (n != prev) next = n;
        }
        if (next < 0 || (links.size() == 1 && cur != idx)) break;
        prev = cur;
        cur = next;
        path.push_back(cur);
      }
    }
    for (int idx : doomed) {
      if (out.data()[idx]) {
        out.data()[idx] = 0;
        changed = true;
      }
    }
  }
  return out;
}

geo::PolylineSet SkeletonToPolylines(const ByteRaster& skeleton) {
  if (skeleton.channels() != 1) {
    throw ShapeError("skeleton must be single-channel");
  }
  if (!IsThin(skeleton)) {
    throw ValidationError("skeleton is not one pixel wide (2x2 block found)");
  }
  const SkeletonGraph graph(skeleton);
  const int w = graph.width();
  const int n = skeleton.width() * skeleton.height();
  const geo::AffineGeoref& g = skeleton.georef();

  std::vector<std::vector<int>> links(n);
  std::vector<int> pixels;
  for (int i = 0; i < n; ++i) {
    if (skeleton.data()[i]) {
      links[i] = graph.Links(i);
      pixels.push_back(i);
    }
  }

  geo::PolylineSet out;
  out.epsg = g.epsg;
  std::set<std::pair<int, int>> used;
  std::vector<bool> visited(n, false);
  auto use = [&](int a, int b) {
    return used.insert({std::min(a, b), std::max(a, b)}).second;
  };
  auto emit = [&](const std::vector<int>& chain) {
    std::vector<int> kept = {chain.front()};
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
      if (!Collinear(kept.back(), chain[i], chain[i + 1], w)) {
        kept.push_back(chain[i]);
      }
    }
    kept.push_back(chain.back());
    geo::Polyline line;
    line.id = static_cast<std::int64_t>(out.lines.size()) + 1;
    for (int idx : kept) line.vertices.push_back(g.PixelCenter(idx % w, idx / w));
    out.lines.push_back(std::move(line));
  };

  for (int node : pixels) {
    if (links[node].size() == 2) continue;
    visited[node] = true;
    for (int next : links[node]) {
      if (!use(node, next)) continue;
      std::vector<int> chain = {node, next};
      int prev = node;
      int cur = next;
      while (links[cur].size() == 2) {
        visited[cur] = true;
        const int step = links[cur][0] == prev ? links[cur][1] : links[cur][0];
        use(cur, step);
        prev = cur;
        cur = step;
        chain.push_back(cur);
      }
      emit(chain);
    }
  }

  // Whatever is left consists of closed loops of degree-2 pixels.
  for (int start : pixels) {
    if (visited[start]) continue;
    std::vector<int> chain = {start};
    visited[start] = true;
    int prev = start;
    int cur = links[start][0];
    while (cur != start) {
      visited[cur] = true;
      chain.push_back(cur);
      const int step = links[cur][0] == prev ? links[cur][1] : links[cur][0];
      prev = cur;
      cur = step;
    }
    chain.push_back(start);
    emit(chain);
  }
  return out;
}

}  // namespace pgrid::rasterops
