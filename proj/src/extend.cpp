#include "hyrl/extend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

// Maximal contiguous runs of member cells among `indices` (assumed sorted,
// consecutive integers adjacent).
std::vector<std::pair<int, int>> runs_of(const std::vector<int>& indices) {
  std::vector<std::pair<int, int>> runs;
  for (size_t i = 0; i < indices.size();) {
    size_t j = i;
    while (j + 1 < indices.size() && indices[j + 1] == indices[j] + 1) ++j;
    runs.push_back({indices[i], indices[j]});
    i = j + 1;
  }
  return runs;
}

}  // namespace

Vec2 backward_flow(const Env& env, const Policy& policy, const Vec2& xi) {
  Vec2 f = env.flow(xi, policy.act(xi));
  return {-f.x, -f.y};
}

ExtendedRegion extend_region(const Env& env, const Policy& policy, const Region& m_i,
                             const Region& critical, const ExtensionConfig& cfg) {
  const Grid& grid = m_i.grid();
  if (!grid.same_geometry(critical.grid()))
    throw InvalidArgument("region and critical set use different grids");

  Region pure = m_i.difference(critical);
  if (pure.empty()) throw InvalidArgument("region has no cells outside the critical set");

  // interface cells: critical cells touching the pure side and pure cells
  // touching the critical set
  std::vector<int> seed_cells;
  for (int idx = 0; idx < grid.cell_count(); ++idx) {
    if (!grid.cell_valid(idx)) continue;
    bool is_critical = critical.contains_cell(idx) && m_i.contains_cell(idx);
    bool is_pure = pure.contains_cell(idx);
    if (!is_critical && !is_pure) continue;
    for (int nb : grid.neighbors(idx)) {
      if ((is_critical && pure.contains_cell(nb)) ||
          (is_pure && critical.contains_cell(nb))) {
        seed_cells.push_back(idx);
        break;
      }
    }
  }

  std::vector<Vec2> pure_centers;
  for (int idx : pure.cells()) pure_centers.push_back(grid.cell_center(idx));
  auto nearest_pure = [&](const Vec2& s) {
    Vec2 best = pure_centers[0];
    double best_d = distance(s, best);
    for (const Vec2& c : pure_centers) {
      double d = distance(s, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  };

  int steps = static_cast<int>(std::lround(cfg.horizon / env.dt()));
  double spacing = grid.cell_width() / 2.0;
  std::vector<char> marked(grid.cell_count(), 0);
  std::vector<int> painter(grid.cell_count(), -1);

  for (size_t s = 0; s < seed_cells.size(); ++s) {
    Vec2 xi = grid.cell_center(seed_cells[s]);
    for (int k = 0; k < steps; ++k) {
      double u = pure.contains(xi) ? policy.act(xi) : env.action_toward(xi, nearest_pure(xi));
      Vec2 next = env.step_backward(xi, u);
      if (!env.in_domain(next)) break;
      int substeps = std::max(1, static_cast<int>(std::ceil(distance(xi, next) / spacing)));
      for (int j = 1; j <= substeps; ++j) {
        Vec2 p = xi + (next - xi) * (static_cast<double>(j) / substeps);
        if (!env.in_domain(p)) continue;
        int cell = grid.cell_of(p);
        if (!marked[cell]) {
          marked[cell] = 1;
          painter[cell] = static_cast<int>(s);
        }
      }
      xi = next;
    }
  }

  ExtendedRegion out;
  out.added = Region(grid);
  for (int idx = 0; idx < grid.cell_count(); ++idx) {
    if (!marked[idx] || m_i.contains_cell(idx) || !grid.cell_valid(idx)) continue;
    out.added.set_cell(idx, true);
    out.witnesses.push_back({idx, grid.cell_center(seed_cells[painter[idx]])});
  }
  out.region = m_i.unite(out.added);
  return out;
}

double overlap_width(const Region& a, const Region& b, const Region* anchor) {
  const Grid& grid = a.grid();
  if (!grid.same_geometry(b.grid()) || (anchor && !grid.same_geometry(anchor->grid())))
    throw InvalidArgument("overlap width needs regions on the same grid");
  Region inter = a.intersect(b);
  if (inter.empty()) return 0.0;
  double h = grid.cell_width();

  auto measure_line = [&](const std::vector<int>& members,
                          const std::vector<int>& anchors) -> double {
    // widest run, restricted to runs touching an anchor cell when given
    double best = 0.0;
    for (const auto& run : runs_of(members)) {
      if (anchor) {
        bool touches = false;
        for (int c : anchors)
          if (c >= run.first && c <= run.second) {
            touches = true;
            break;
          }
        if (!touches) continue;
      }
      best = std::max(best, (run.second - run.first + 1) * h);
    }
    return best;
  };

  if (grid.kind == Grid::Kind::angular) {
    return measure_line(inter.cells(), anchor ? anchor->cells() : std::vector<int>{});
  }

  double width = std::numeric_limits<double>::infinity();
  bool measured = false;
  for (int ix = 0; ix < grid.nx; ++ix) {
    std::vector<int> members, anchors;
    for (int iy = 0; iy < grid.ny; ++iy) {
      int idx = iy * grid.nx + ix;
      if (inter.contains_cell(idx)) members.push_back(iy);
      if (anchor && anchor->contains_cell(idx)) anchors.push_back(iy);
    }
    if (anchor ? anchors.empty() : members.empty()) continue;
    width = std::min(width, measure_line(members, anchors));
    measured = true;
  }
  return measured ? width : 0.0;
}

double require_overlap(const Region& a, const Region& b, const Region* anchor,
                       double min_width) {
  double w = overlap_width(a, b, anchor);
  if (w < min_width) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "extended regions overlap by %.4f < %.4f; increase the backward "
                  "propagation horizon",
                  w, min_width);
    throw InsufficientOverlap(msg, w);
  }
  return w;
}

}  // namespace hyrl
