#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyrl/common.hpp"

namespace hyrl {

// Discretization of a state space into cells. Two geometries are supported:
//  - angular: N equal cells over [0, 2pi); indexing follows the angle chart,
//    and adjacency does NOT wrap at 0/2pi (the chart is cut at the setpoint
//    angle, mirroring the interval presentation [0, 2pi) of the regions).
//  - box: nx-by-ny cells over an axis-aligned rectangle, with an optional
//    blocked sub-rectangle whose cells are outside the constraint set.
struct Grid {
  enum class Kind { angular, box };

  Kind kind = Kind::angular;
  int n = 0;                      // angular cell count
  int nx = 0, ny = 0;             // box cell counts
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool has_blocked = false;
  double bx0 = 0, bx1 = 0, by0 = 0, by1 = 0;

  static Grid angular(int cells);
  static Grid box(int nx, int ny, double x0, double x1, double y0, double y1);

  int cell_count() const { return kind == Kind::angular ? n : nx * ny; }
  double cell_width() const;      // angular cell size or box cell size (square)

  // Nearest-cell membership for any state in the chart domain.
  int cell_of(const Vec2& state) const;
  int cell_of_angle(double theta) const;
  int cell_of_xy(double x, double y) const;

  // Cell center, as a state (angular grids return the unit vector).
  Vec2 cell_center(int idx) const;
  double cell_center_angle(int idx) const;
  void cell_center_xy(int idx, double& x, double& y) const;

  // True when the cell belongs to the constraint set (not blocked).
  bool cell_valid(int idx) const;
  int valid_cell_count() const;

  // 1-D (angular, non-wrapping) or 4-neighborhood (box) adjacency.
  std::vector<int> neighbors(int idx) const;

  bool same_geometry(const Grid& o) const;
};

// A subset of grid cells.
class Region {
 public:
  Region() = default;
  explicit Region(const Grid& grid) : grid_(grid), cells_(grid.cell_count(), 0) {}

  const Grid& grid() const { return grid_; }

  bool contains_cell(int idx) const { return cells_[idx] != 0; }
  bool contains(const Vec2& state) const;
  void set_cell(int idx, bool in) { cells_[idx] = in ? 1 : 0; }

  int cell_count() const;                 // number of member cells
  bool empty() const { return cell_count() == 0; }
  std::vector<int> cells() const;         // sorted member indices

  Region unite(const Region& o) const;
  Region intersect(const Region& o) const;
  Region complement() const;              // within valid cells
  Region difference(const Region& o) const;
  bool equals(const Region& o) const;
  bool subset_of(const Region& o) const;

  // Cells of this region adjacent to a valid cell outside it.
  Region inner_boundary() const;
  // Complement plus the inner boundary: the grid-level closure of S \ R.
  Region closed_complement() const;

  // Connected components over valid cells (angular: runs; box: 4-neigh BFS).
  std::vector<Region> components() const;

  // Angular grids: maximal runs of member cells as [lo, hi) angle intervals.
  std::vector<std::pair<double, double>> angular_intervals() const;

  // Human-readable one-line summary (intervals or per-axis extents).
  std::string summary() const;

  // Versioned text format with run-length encoded membership.
  std::string serialize() const;
  static Region deserialize(const std::string& text);
  void save(const std::string& path) const;
  static Region load(const std::string& path);

 private:
  void check_compatible(const Region& o) const;

  Grid grid_;
  std::vector<uint8_t> cells_;
};

// Uniform sample over the region: pick a member cell, then jitter inside it.
Vec2 sample_state_in(const Region& region, Rng& rng);

}  // namespace hyrl
