#include "pgrid/coverage/coverage.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pgrid::coverage {

using geo::Point2;

namespace {

void CheckCellSize(double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ValidationError("cell size must be positive");
  }
}

// Liang-Barsky clip of a-b to the closed box; false when they miss.
bool Clip(Point2 a, Point2 b, double x0, double y0, double x1, double y1, Point2* ca,
          Point2* cb) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return false;
      continue;
    }
    const double t = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  *ca = {a.x + t0 * dx, a.y + t0 * dy};
  *cb = {a.x + t1 * dx, a.y + t1 * dy};
  return true;
}

void AddSegment(std::set<Cell>& cells, const Point2& a, const Point2& b, double cs,
                const Point2& o) {
  const std::set<Cell> s = SegmentCells(a, b, cs, o);
  cells.insert(s.begin(), s.end());
}

}  // namespace

Cell CellOf(const Point2& p, double cell_size, const Point2& origin) {
  return {static_cast<std::int64_t>(std::floor((p.x - origin.x) / cell_size)),
          static_cast<std::int64_t>(std::floor((p.y - origin.y) / cell_size))};
}

std::set<Cell> SegmentCells(const Point2& a, const Point2& b, double cs, const Point2& o) {
  CheckCellSize(cs);
  if (a == b) return {CellOf(a, cs, o)};
  const Cell ca = CellOf(a, cs, o), cb = CellOf(b, cs, o);
  std::set<Cell> out;
  // One extra ring catches end points lying exactly on a cell's low edge.
  for (std::int64_t i = std::min(ca.first, cb.first) - 1; i <= std::max(ca.first, cb.first);
       ++i) {
    for (std::int64_t j = std::min(ca.second, cb.second) - 1;
         j <= std::max(ca.second, cb.second); ++j) {
      const double x0 = o.x + i * cs, y0 = o.y + j * cs;
      Point2 p, q;
      if (!Clip(a, b, x0, y0, x0 + cs, y0 + cs, &p, &q)) continue;
      const Point2 mid{(p.x + q.x) / 2, (p.y + q.y) / 2};
      if (CellOf(mid, cs, o) == Cell{i, j}) out.insert({i, j});
    }
  }
  return out;
}

Point2 DefaultOrigin(const geo::GridLayout& layout, double cell_size) {
  CheckCellSize(cell_size);
  double mx = std::numeric_limits<double>::infinity();
  double my = mx;
  auto visit = [&](const Point2& p) {
    mx = std::min(mx, p.x);
    my = std::min(my, p.y);
  };
  for (const auto& p : layout.poles.points) visit(p.position);
  for (const auto& l : layout.line_skeletons.lines) {
    for (const auto& v : l.vertices) visit(v);
  }
  for (const auto& poly : layout.line_polygons.polygons) {
    for (const auto& v : poly.ring) visit(v);
  }
  if (!std::isfinite(mx)) return {0.0, 0.0};
  return {std::floor(mx / cell_size) * cell_size, std::floor(my / cell_size) * cell_size};
}

CellGrid Gridify(const geo::GridLayout& layout, double cs, const Point2& o,
                 std::string source) {
  CheckCellSize(cs);
  CellGrid g;
  g.cell_size = cs;
  g.origin = o;
  g.source = std::move(source);
  for (const auto& p : layout.poles.points) {
    if (p.polarity == geo::Polarity::kPole) g.occupied.insert(CellOf(p.position, cs, o));
  }
  for (const auto& l : layout.line_skeletons.lines) {
    for (std::size_t k = 0; k + 1 < l.vertices.size(); ++k) {
      AddSegment(g.occupied, l.vertices[k], l.vertices[k + 1], cs, o);
    }
    if (l.vertices.size() == 1) g.occupied.insert(CellOf(l.vertices[0], cs, o));
  }
  for (const auto& poly : layout.line_polygons.polygons) {
    const auto& ring = poly.ring;
    if (ring.empty()) continue;
    std::int64_t i0 = std::numeric_limits<std::int64_t>::max(), i1 = -i0, j0 = i0, j1 = -i0;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      AddSegment(g.occupied, ring[k], ring[(k + 1) % ring.size()], cs, o);
      const Cell c = CellOf(ring[k], cs, o);
      i0 = std::min(i0, c.first);
      i1 = std::max(i1, c.first);
      j0 = std::min(j0, c.second);
      j1 = std::max(j1, c.second);
    }
    // Cells entirely inside the polygon have no edge crossing them.
    for (std::int64_t i = i0; i <= i1; ++i) {
      for (std::int64_t j = j0; j <= j1; ++j) {
        if (poly.Contains({o.x + (i + 0.5) * cs, o.y + (j + 0.5) * cs})) {
          g.occupied.insert({i, j});
        }
      }
    }
  }
  return g;
}

Comparison Compare(const CellGrid& ours, const CellGrid& external) {
  if (ours.cell_size != external.cell_size || !(ours.origin == external.origin)) {
    throw ValidationError("cell grids use different lattices");
  }
  Comparison c;
  c.cell_size = ours.cell_size;
  c.origin = ours.origin;
  c.n_ours = ours.occupied.size();
  c.n_external = external.occupied.size();
  std::set_intersection(ours.occupied.begin(), ours.occupied.end(), external.occupied.begin(),
                        external.occupied.end(), std::inserter(c.both, c.both.end()));
  std::set_difference(ours.occupied.begin(), ours.occupied.end(), external.occupied.begin(),
                      external.occupied.end(), std::inserter(c.only_ours, c.only_ours.end()));
  std::set_difference(external.occupied.begin(), external.occupied.end(),
                      ours.occupied.begin(), ours.occupied.end(),
                      std::inserter(c.only_external, c.only_external.end()));
  return c;
}

nlohmann::json ToJson(const Comparison& c) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [i, j] : c.only_ours) cells.push_back({i, j});
  return {{"cell_size", c.cell_size},
          {"origin", {c.origin.x, c.origin.y}},
          {"n_ours", c.n_ours},
          {"n_external", c.n_external},
          {"n_both", c.both.size()},
          {"n_newly_mapped", c.only_ours.size()},
          {"n_only_external", c.only_external.size()},
          {"newly_mapped_cells", cells}};
}

}  // namespace pgrid::coverage
