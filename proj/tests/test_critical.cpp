#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hyrl/critical.hpp"
#include "hyrl/errors.hpp"

using namespace hyrl;

namespace {

// bang-bang controller that splits behaviors at a chosen angle: above it the
// state spins up, below it spins down
struct SplitAt : Policy {
  explicit SplitAt(double split) : split_(split) {}
  std::string kind() const override { return "split"; }
  double act(const Vec2& obs) const override { return angle_of(obs) > split_ ? 1.0 : -1.0; }
  nlohmann::json to_json() const override { return {}; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<SplitAt>(split_); }
  double split_;
};

struct AlwaysUp : Policy {
  std::string kind() const override { return "up"; }
  double act(const Vec2&) const override { return 1.0; }
  nlohmann::json to_json() const override { return {}; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<AlwaysUp>(); }
};

// flee the midline: behaviors split at y = 0
struct FleeMidline : Policy {
  std::string kind() const override { return "flee"; }
  double act(const Vec2& obs) const override { return obs.y >= 0.0 ? 1.0 : -1.0; }
  nlohmann::json to_json() const override { return {}; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<FleeMidline>(); }
};

}  // namespace

TEST_CASE("divergence probing finds the split angle of a bang-bang loop") {
  UnitCircleEnv env;
  SplitAt policy(2.0);
  CriticalSet cs = find_critical_set(env, policy);

  REQUIRE_FALSE(cs.region.empty());
  CHECK(cs.theta_c == doctest::Approx(2.0).epsilon(0.05));
  CHECK(cs.boundary_near(unit_from_angle(1.0)) == cs.theta_c);

  Grid g = env.make_grid();
  for (int idx : cs.region.cells()) {
    CHECK(std::abs(g.cell_center_angle(idx) - 2.0) < 0.06 + g.cell_width());
  }

  // witnesses pin one probe on each side of the split
  REQUIRE_FALSE(cs.witnesses.empty());
  for (const CellWitness& w : cs.witnesses) {
    CHECK(cs.region.contains_cell(w.cell));
    CHECK(angle_of(w.probe_class0) < 2.0);
    CHECK(angle_of(w.probe_class1) > 2.0);
  }
}

TEST_CASE("a loop without diverging behaviors yields an empty critical set") {
  UnitCircleEnv env;
  AlwaysUp policy;
  CriticalSet cs = find_critical_set(env, policy);
  CHECK(cs.region.empty());
  CHECK_THROWS_AS(partition_regions(cs.region), TopologyError);
}

TEST_CASE("partitioning splits the complement into two closed sides") {
  UnitCircleEnv env;
  SplitAt policy(2.0);
  CriticalSet cs = find_critical_set(env, policy);
  BehaviorPartition parts = partition_regions(cs.region);

  // the two sides cover everything and share exactly the critical cells
  Region all = cs.region.complement().unite(cs.region);
  CHECK(parts.m0.unite(parts.m1).equals(all));
  CHECK(parts.m0.intersect(parts.m1).equals(cs.region));
  CHECK(cs.region.subset_of(parts.m0));
  CHECK(cs.region.subset_of(parts.m1));

  // m0 is the low-angle side
  Grid g = env.make_grid();
  CHECK(parts.m0.contains_cell(g.cell_of_angle(0.5)));
  CHECK_FALSE(parts.m0.contains_cell(g.cell_of_angle(4.0)));
  CHECK(parts.m1.contains_cell(g.cell_of_angle(4.0)));
}

TEST_CASE("a critical set with more than one gap refuses to partition") {
  Grid g = Grid::angular(100);
  Region two_arcs(g);
  for (int i = 20; i < 25; ++i) two_arcs.set_cell(i, true);
  for (int i = 60; i < 65; ++i) two_arcs.set_cell(i, true);
  CHECK_THROWS_AS(partition_regions(two_arcs), TopologyError);
}

TEST_CASE("the obstacle midline shows up as a critical corridor") {
  ObstacleEnv env;
  FleeMidline policy;
  CriticalConfig cfg;
  cfg.divergence_time = 2.0;
  CriticalSet cs = find_critical_set(env, policy, cfg);

  REQUIRE_FALSE(cs.region.empty());
  Grid g = env.make_grid();
  for (int idx : cs.region.cells()) {
    Vec2 c = g.cell_center(idx);
    CHECK(std::abs(c.y) < 0.2);
  }
  // the corridor reaches the entry column and the far side of the obstacle
  bool at_entry = false, downstream = false;
  for (int idx : cs.region.cells()) {
    Vec2 c = g.cell_center(idx);
    if (c.x < 0.1) at_entry = true;
    if (c.x > 1.4) downstream = true;
  }
  CHECK(at_entry);
  CHECK(downstream);
  CHECK(std::abs(cs.boundary_near({0.5, 1.0})) < 0.1);

  BehaviorPartition parts = partition_regions(cs.region);
  CHECK(parts.m0.contains({0.5, 1.0}));
  CHECK(parts.m1.contains({0.5, -1.0}));
  CHECK(parts.m0.intersect(parts.m1).equals(cs.region));
}

TEST_CASE("critical sets round-trip through their two artifact files") {
  UnitCircleEnv env;
  SplitAt policy(2.0);
  CriticalSet cs = find_critical_set(env, policy);

  auto dir = std::filesystem::temp_directory_path();
  auto region_path = (dir / "hyrl_test_critical.region").string();
  auto witness_path = (dir / "hyrl_test_witnesses.json").string();
  cs.region.save(region_path);
  save_critical_witnesses(cs, witness_path);

  CriticalSet back = load_critical_set(region_path, witness_path);
  CHECK(back.region.equals(cs.region));
  CHECK(back.theta_c == cs.theta_c);
  CHECK(back.witnesses.size() == cs.witnesses.size());
  CHECK(back.boundary_y == cs.boundary_y);

  std::filesystem::remove(region_path);
  std::filesystem::remove(witness_path);
  CHECK_THROWS_AS(load_critical_set(region_path, witness_path), IoError);
}
