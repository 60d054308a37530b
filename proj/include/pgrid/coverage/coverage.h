#ifndef PGRID_COVERAGE_COVERAGE_H_
#define PGRID_COVERAGE_COVERAGE_H_

#include <cstdint>
#include <set>
#include <string>
#include <utility>

#include "json.hpp"
#include "pgrid/geo/types.h"

namespace pgrid::coverage {

inline constexpr double kDefaultCellSize = 250.0;

using Cell = std::pair<std::int64_t, std::int64_t>;  // (i, j) = (x, y) index

struct CellGrid {
  double cell_size = kDefaultCellSize;
  geo::Point2 origin;
  std::set<Cell> occupied;
  std::string source;
};

// Cell of a point: floor((p - origin) / cell_size), cells half-open.
Cell CellOf(const geo::Point2& p, double cell_size, const geo::Point2& origin);

// Minimum corner of the layout's bounding box snapped down to a multiple of
// cell_size; (0, 0) for an empty layout.
geo::Point2 DefaultOrigin(const geo::GridLayout& layout, double cell_size);

// Cells touched by segment a-b: the segment is clipped to each candidate
// closed cell and the cell counts when the clipped midpoint lies in its
// half-open box. A zero-length segment reduces to its point.
std::set<Cell> SegmentCells(const geo::Point2& a, const geo::Point2& b,
                            double cell_size, const geo::Point2& origin);

// Occupied cells: cells holding a pole, crossed by a skeleton segment or a
// corridor edge, or lying inside a corridor. Throws ValidationError if
// cell_size <= 0.
CellGrid Gridify(const geo::GridLayout& layout, double cell_size,
                 const geo::Point2& origin, std::string source = "");

struct Comparison {
  double cell_size = 0.0;
  geo::Point2 origin;
  std::set<Cell> both;
  std::set<Cell> only_ours;  // newly mapped
  std::set<Cell> only_external;
  std::size_t n_ours = 0;
  std::size_t n_external = 0;
};

// Throws ValidationError unless both grids share cell size and origin.
Comparison Compare(const CellGrid& ours, const CellGrid& external);

nlohmann::json ToJson(const Comparison& c);

}  // namespace pgrid::coverage

#endif  // PGRID_COVERAGE_COVERAGE_H_
