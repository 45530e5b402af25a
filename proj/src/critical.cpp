#include "hyrl/critical.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

double default_probe_radius(const Grid& grid) {
  // angular: ~5 cells of the fine circle grid; box: just over one cell
  return grid.kind == Grid::Kind::angular ? 0.05 : 0.08;
}

}  // namespace

double CriticalSet::boundary_near(const Vec2& state) const {
  const Grid& grid = region.grid();
  if (grid.kind == Grid::Kind::angular) return theta_c;
  if (boundary_y.empty()) return 0.0;
  double w = (grid.x1 - grid.x0) / grid.nx;
  int ix = static_cast<int>(std::floor((state.x - grid.x0) / w));
  ix = std::max(0, std::min(grid.nx - 1, ix));
  return boundary_y[ix];
}

CriticalSet find_critical_set(const Env& env, const Policy& policy, const CriticalConfig& cfg) {
  Grid grid = env.make_grid();
  double rho = cfg.probe_radius > 0.0 ? cfg.probe_radius : default_probe_radius(grid);
  int steps = std::max(1, static_cast<int>(std::lround(cfg.divergence_time / env.dt())));

  CriticalSet out;
  out.region = Region(grid);
  if (grid.kind == Grid::Kind::box) out.boundary_y.assign(grid.nx, 0.0);

  double theta_sum = 0.0;
  int theta_count = 0;
  std::vector<double> col_sum(grid.kind == Grid::Kind::box ? grid.nx : 0, 0.0);
  std::vector<int> col_count(col_sum.size(), 0);

  for (int idx = 0; idx < grid.cell_count(); ++idx) {
    if (!grid.cell_valid(idx)) continue;
    Vec2 center = grid.cell_center(idx);
    bool seen0 = false, seen1 = false;
    Vec2 probe0, probe1;
    for (const Vec2& probe : env.probe_states(center, rho)) {
      Rollout r = run_rollout(env, policy, probe, steps);
      int cls = env.classify_rollout(r);
      if (cls == 0 && !seen0) {
        seen0 = true;
        probe0 = probe;
      } else if (cls == 1 && !seen1) {
        seen1 = true;
        probe1 = probe;
      }
      if (seen0 && seen1) break;
    }
    if (!(seen0 && seen1)) continue;
    out.region.set_cell(idx, true);
    out.witnesses.push_back({idx, probe0, probe1});
    if (grid.kind == Grid::Kind::angular) {
      theta_sum += grid.cell_center_angle(idx);
      ++theta_count;
    } else {
      double x, y;
      grid.cell_center_xy(idx, x, y);
      int ix = idx % grid.nx;
      col_sum[ix] += y;
      ++col_count[ix];
    }
  }

  if (theta_count > 0) out.theta_c = theta_sum / theta_count;
  for (size_t ix = 0; ix < col_sum.size(); ++ix)
    if (col_count[ix] > 0) out.boundary_y[ix] = col_sum[ix] / col_count[ix];
  return out;
}

BehaviorPartition partition_regions(const Region& critical) {
  std::vector<Region> comps = critical.complement().components();
  if (comps.size() != 2) {
    throw TopologyError("complement of the critical set has " +
                        std::to_string(comps.size()) + " components, expected 2");
  }
  const Grid& grid = critical.grid();
  int first = 0;
  if (grid.kind == Grid::Kind::angular) {
    // low-angle side first
    first = comps[0].cells().front() < comps[1].cells().front() ? 0 : 1;
  } else {
    // high-y side first
    double top[2];
    for (int i = 0; i < 2; ++i) {
      double best = grid.y0;
      for (int idx : comps[i].cells()) {
        double x, y;
        grid.cell_center_xy(idx, x, y);
        best = std::max(best, y);
      }
      top[i] = best;
    }
    first = top[0] > top[1] ? 0 : 1;
  }
  BehaviorPartition part;
  part.m0 = comps[first].unite(critical);
  part.m1 = comps[1 - first].unite(critical);
  return part;
}

void save_critical_witnesses(const CriticalSet& set, const std::string& path) {
  nlohmann::json j;
  j["format"] = "critical-witnesses";
  j["version"] = 1;
  j["theta_c"] = set.theta_c;
  j["boundary_y"] = set.boundary_y;
  nlohmann::json arr = nlohmann::json::array();
  for (const CellWitness& w : set.witnesses) {
    arr.push_back({{"cell", w.cell},
                   {"class0", {w.probe_class0.x, w.probe_class0.y}},
                   {"class1", {w.probe_class1.x, w.probe_class1.y}}});
  }
  j["witnesses"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << "\n";
}

CriticalSet load_critical_set(const std::string& region_path, const std::string& witness_path) {
  CriticalSet set;
  set.region = Region::load(region_path);
  std::ifstream in(witness_path);
  if (!in) throw IoError("cannot open " + witness_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(witness_path + ": " + e.what());
  }
  if (j.value("format", "") != "critical-witnesses" || j.value("version", 0) != 1)
    throw IoError(witness_path + ": not a critical-witnesses file");
  set.theta_c = j.at("theta_c").get<double>();
  set.boundary_y = j.value("boundary_y", std::vector<double>{});
  for (const auto& e : j.at("witnesses")) {
    CellWitness w;
    w.cell = e.at("cell").get<int>();
    w.probe_class0 = {e.at("class0")[0].get<double>(), e.at("class0")[1].get<double>()};
    w.probe_class1 = {e.at("class1")[0].get<double>(), e.at("class1")[1].get<double>()};
    set.witnesses.push_back(w);
  }
  return set;
}

}  // namespace hyrl
