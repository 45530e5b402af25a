#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hyrl/critical.hpp"
#include "hyrl/errors.hpp"
#include "hyrl/extend.hpp"

using namespace hyrl;

namespace {

struct SplitAt : Policy {
  explicit SplitAt(double split) : split_(split) {}
  std::string kind() const override { return "split"; }
  double act(const Vec2& obs) const override { return angle_of(obs) > split_ ? 1.0 : -1.0; }
  nlohmann::json to_json() const override { return {}; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<SplitAt>(split_); }
  double split_;
};

struct ConstU : Policy {
  explicit ConstU(double u) : u_(u) {}
  std::string kind() const override { return "const"; }
  double act(const Vec2&) const override { return u_; }
  nlohmann::json to_json() const override { return {}; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ConstU>(u_); }
  double u_;
};

Region angle_band(const Grid& g, double lo, double hi) {
  Region r(g);
  for (int i = 0; i < g.cell_count(); ++i) {
    double c = g.cell_center_angle(i);
    if (c >= lo && c <= hi) r.set_cell(i, true);
  }
  return r;
}

}  // namespace

TEST_CASE("backward flow is the sign-flipped closed loop") {
  UnitCircleEnv circle;
  ConstU up(1.0);
  Vec2 b = backward_flow(circle, up, {0.0, 1.0});
  CHECK(b.x == doctest::Approx(1.0));
  CHECK(b.y == doctest::Approx(0.0));

  ObstacleEnv box;
  ConstU half(0.5);
  Vec2 bb = backward_flow(box, half, {2.0, 0.3});
  CHECK(bb.x == doctest::Approx(-1.0));
  CHECK(bb.y == doctest::Approx(-0.5));
}

TEST_CASE("a forward step followed by a backward step returns home") {
  ObstacleEnv box;
  Vec2 s{0.5, 0.3};
  Vec2 fwd = box.step(s, -0.5).state;
  Vec2 back = box.step_backward(fwd, -0.5);
  CHECK(distance(back, s) <= 1e-12);

  // the circle renormalizes both half-steps, which cancels exactly
  UnitCircleEnv circle;
  Vec2 c = unit_from_angle(2.2);
  Vec2 there = circle.step(c, 1.0).state;
  Vec2 home = circle.step_backward(there, 1.0);
  CHECK(distance(home, c) <= 1e-12);
}

TEST_CASE("zero horizon adds nothing") {
  UnitCircleEnv env;
  SplitAt policy(2.0);
  Region critical = angle_band(env.make_grid(), 1.98, 2.02);
  BehaviorPartition parts = partition_regions(critical);

  ExtensionConfig cfg;
  cfg.horizon = 0.0;
  ExtendedRegion ext = extend_region(env, policy, parts.m0, critical, cfg);
  CHECK(ext.added.empty());
  CHECK(ext.region.equals(parts.m0));
  CHECK(ext.witnesses.empty());
}

TEST_CASE("backward propagation grows each side across the split") {
  UnitCircleEnv env;
  SplitAt policy(2.0);
  Grid g = env.make_grid();
  Region critical = angle_band(g, 1.98, 2.02);
  BehaviorPartition parts = partition_regions(critical);

  ExtensionConfig cfg;
  cfg.horizon = 0.5;
  ExtendedRegion e0 = extend_region(env, policy, parts.m0, critical, cfg);
  ExtendedRegion e1 = extend_region(env, policy, parts.m1, critical, cfg);

  // originals are kept, growth lands on the far side of the split
  CHECK(parts.m0.subset_of(e0.region));
  CHECK(parts.m1.subset_of(e1.region));
  CHECK(e0.added.equals(e0.region.difference(parts.m0)));
  REQUIRE_FALSE(e0.added.empty());
  REQUIRE_FALSE(e1.added.empty());

  // the low side flows backward upward: roughly split..split+horizon
  auto iv0 = e0.region.angular_intervals();
  REQUIRE(iv0.size() == 1);
  CHECK(iv0[0].first == doctest::Approx(0.0));
  CHECK(iv0[0].second == doctest::Approx(2.0 + 0.5).epsilon(0.05));
  auto iv1 = e1.region.angular_intervals();
  REQUIRE(iv1.size() == 1);
  CHECK(iv1[0].first == doctest::Approx(2.0 - 0.5).epsilon(0.05));
  CHECK(iv1[0].second == doctest::Approx(kTwoPi));

  // every added cell carries the seed that painted it
  for (const ExtensionWitness& w : e0.witnesses) {
    CHECK(e0.added.contains_cell(w.cell));
    bool seed_known = critical.contains(w.seed) || parts.m0.contains(w.seed);
    CHECK(seed_known);
  }

  // a longer horizon only grows the reach
  ExtensionConfig longer;
  longer.horizon = 0.8;
  ExtendedRegion e0_long = extend_region(env, policy, parts.m0, critical, longer);
  CHECK(e0.added.subset_of(e0_long.added));

  // the union of the extended sides still covers the circle
  CHECK(e0.region.unite(e1.region).cell_count() == g.valid_cell_count());
}

TEST_CASE("extension refuses a region with no pure cells") {
  UnitCircleEnv env;
  SplitAt policy(2.0);
  Region critical = angle_band(env.make_grid(), 1.98, 2.02);
  CHECK_THROWS_AS(extend_region(env, policy, critical, critical, ExtensionConfig{}), InvalidArgument);
}

TEST_CASE("overlap width measures the contiguous shared band") {
  Grid g = Grid::angular(628);
  double w = g.cell_width();
  Region a = angle_band(g, 0.0, 0.63 * kPi);
  Region b = angle_band(g, 0.37 * kPi, kTwoPi - 1e-9);
  double width = overlap_width(a, b);
  CHECK(std::abs(width - 0.26 * kPi) <= 2 * w);

  CHECK(overlap_width(a, Region(g)) == 0.0);

  // an anchor keeps side lobes from counting
  Region with_lobe = a.unite(angle_band(g, 1.5 * kPi, 1.9 * kPi));
  Region anchor = angle_band(g, 0.5 * kPi - 0.02, 0.5 * kPi + 0.02);
  double anchored = overlap_width(with_lobe, b, &anchor);
  CHECK(std::abs(anchored - 0.26 * kPi) <= 2 * w);
  // without the anchor the detached lobe could only widen the answer
  CHECK(overlap_width(with_lobe, b) >= anchored);

  // an anchor outside the intersection measures nothing
  Region far_anchor = angle_band(g, 1.95 * kPi, 1.99 * kPi);
  CHECK(overlap_width(a, b, &far_anchor) == 0.0);
}

TEST_CASE("box overlap width is the thinnest anchored column") {
  Grid g = Grid::box(10, 10, 0.0, 1.0, 0.0, 1.0);
  double h = g.cell_width();
  Region a(g), b(g);
  // a: bottom 6 rows in columns 0-4; b: bottom 3 rows in column 0, bottom 5
  // rows in columns 1-4
  for (int ix = 0; ix < 5; ++ix)
    for (int iy = 0; iy < 6; ++iy) a.set_cell(iy * g.nx + ix, true);
  for (int iy = 0; iy < 3; ++iy) b.set_cell(iy * g.nx + 0, true);
  for (int ix = 1; ix < 5; ++ix)
    for (int iy = 0; iy < 5; ++iy) b.set_cell(iy * g.nx + ix, true);

  CHECK(overlap_width(a, b) == doctest::Approx(3 * h));

  // anchored away from the thin column, the wide columns set the width
  Region anchor(g);
  anchor.set_cell(2 * g.nx + 3, true);
  CHECK(overlap_width(a, b, &anchor) == doctest::Approx(5 * h));

  // a column run not touching the anchor row is ignored
  Region split_col(g);
  for (int iy = 0; iy < 2; ++iy) split_col.set_cell(iy * g.nx + 3, true);
  for (int iy = 4; iy < 9; ++iy) split_col.set_cell(iy * g.nx + 3, true);
  Region full_col(g);
  for (int iy = 0; iy < 10; ++iy) full_col.set_cell(iy * g.nx + 3, true);
  Region low_anchor(g);
  low_anchor.set_cell(1 * g.nx + 3, true);
  CHECK(overlap_width(split_col, full_col, &low_anchor) == doctest::Approx(2 * h));
}

TEST_CASE("require_overlap throws with the measured width attached") {
  Grid g = Grid::angular(628);
  Region a = angle_band(g, 0.0, 1.0);
  Region b = angle_band(g, 0.99, kTwoPi - 1e-9);
  try {
    require_overlap(a, b, nullptr, 0.5);
    FAIL("expected InsufficientOverlap");
  } catch (const InsufficientOverlap& e) {
    CHECK(e.width < 0.1);
    CHECK(e.width > 0.0);
  }
  CHECK(require_overlap(a, b, nullptr, 0.001) > 0.0);
}
