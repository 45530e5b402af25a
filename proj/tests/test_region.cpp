#include <algorithm>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "hyrl/errors.hpp"
#include "hyrl/region.hpp"

using namespace hyrl;

namespace {

Region random_region(const Grid& grid, uint64_t seed, double fill) {
  Region r(grid);
  Rng rng(seed);
  for (int i = 0; i < grid.cell_count(); ++i)
    if (grid.cell_valid(i) && rng.uniform01() < fill) r.set_cell(i, true);
  return r;
}

Region span(const Grid& grid, int lo, int hi) {  // [lo, hi)
  Region r(grid);
  for (int i = lo; i < hi; ++i) r.set_cell(i, true);
  return r;
}

}  // namespace

TEST_CASE("angular grid indexing wraps states but not adjacency") {
  Grid g = Grid::angular(628);
  CHECK(g.cell_count() == 628);
  CHECK(g.cell_width() == doctest::Approx(kTwoPi / 628));
  CHECK(g.cell_of_angle(0.0) == 0);
  CHECK(g.cell_of_angle(kTwoPi - 1e-9) == 627);
  CHECK(g.cell_of_angle(kTwoPi + 0.001) == 0);
  CHECK(g.cell_of(unit_from_angle(3.0)) == g.cell_of_angle(3.0));
  CHECK(g.cell_center_angle(0) == doctest::Approx(g.cell_width() / 2));

  CHECK(g.neighbors(0) == std::vector<int>{1});
  CHECK(g.neighbors(627) == std::vector<int>{626});
  CHECK(g.neighbors(10) == std::vector<int>{9, 11});
  CHECK(g.valid_cell_count() == 628);
}

TEST_CASE("box grid blocks the obstacle cells") {
  Grid g = Grid::box(60, 60, 0.0, 3.0, -1.5, 1.5);
  g.has_blocked = true;
  g.bx0 = 0.8;
  g.bx1 = 1.3;
  g.by0 = -0.25;
  g.by1 = 0.25;

  CHECK(g.cell_width() == doctest::Approx(0.05));
  CHECK(g.cell_count() == 3600);
  CHECK(g.valid_cell_count() == 3500);
  CHECK_FALSE(g.cell_valid(g.cell_of_xy(1.0, 0.0)));
  CHECK(g.cell_valid(g.cell_of_xy(1.0, 0.5)));
  CHECK(g.cell_valid(g.cell_of_xy(0.5, 0.0)));

  // out-of-chart states clamp to the border cells
  CHECK(g.cell_of_xy(-5.0, -5.0) == 0);
  CHECK(g.cell_of_xy(5.0, 5.0) == 3599);

  // interior cells have 4 geometric neighbors, corners 2; validity is the
  // caller's concern, so a cell beside the block still lists the blocked one
  CHECK(g.neighbors(g.cell_of_xy(1.5, 0.5)).size() == 4);
  CHECK(g.neighbors(0).size() == 2);
  auto nb = g.neighbors(g.cell_of_xy(0.77, 0.0));
  CHECK(nb.size() == 4);
  int invalid_neighbors = 0;
  for (int n : nb)
    if (!g.cell_valid(n)) ++invalid_neighbors;
  CHECK(invalid_neighbors == 1);
}

TEST_CASE("region set algebra satisfies the usual identities") {
  Grid g = Grid::angular(200);
  Region a = random_region(g, 1, 0.3);
  Region b = random_region(g, 2, 0.5);

  Region uni = a.unite(b);
  Region inter = a.intersect(b);
  CHECK(inter.subset_of(a));
  CHECK(a.subset_of(uni));
  CHECK(uni.cell_count() == a.cell_count() + b.cell_count() - inter.cell_count());

  // De Morgan
  CHECK(uni.complement().equals(a.complement().intersect(b.complement())));
  CHECK(a.difference(b).equals(a.intersect(b.complement())));
  CHECK(a.complement().complement().equals(a));
  CHECK(a.difference(b).unite(inter).equals(a));
}

TEST_CASE("complement only produces valid cells") {
  Grid g = Grid::box(8, 8, 0.0, 1.0, 0.0, 1.0);
  g.has_blocked = true;
  g.bx0 = 0.25;
  g.bx1 = 0.5;
  g.by0 = 0.25;
  g.by1 = 0.5;
  Region empty(g);
  Region full = empty.complement();
  CHECK(full.cell_count() == g.valid_cell_count());
  for (int idx : full.cells()) CHECK(g.cell_valid(idx));
}

TEST_CASE("angular components are maximal runs without wraparound") {
  Grid g = Grid::angular(100);
  Region r = span(g, 5, 11).unite(span(g, 20, 31));
  auto comps = r.components();
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].cell_count() == 6);
  CHECK(comps[1].cell_count() == 11);

  // membership touching both ends stays two components: the chart is cut at 0
  Region ends = span(g, 0, 10).unite(span(g, 90, 100));
  CHECK(ends.components().size() == 2);
}

TEST_CASE("box components use 4-connectivity") {
  Grid g = Grid::box(10, 10, 0.0, 1.0, 0.0, 1.0);
  Region r(g);
  // an L-shape and a far-away dot
  for (int i = 0; i < 5; ++i) r.set_cell(g.cell_of_xy(0.05 + 0.1 * i, 0.05), true);
  for (int j = 1; j < 4; ++j) r.set_cell(g.cell_of_xy(0.05, 0.05 + 0.1 * j), true);
  r.set_cell(g.cell_of_xy(0.95, 0.95), true);
  auto comps = r.components();
  REQUIRE(comps.size() == 2);
  CHECK(std::max(comps[0].cell_count(), comps[1].cell_count()) == 8);

  // diagonal contact does not connect
  Region diag(g);
  diag.set_cell(g.cell_of_xy(0.05, 0.05), true);
  diag.set_cell(g.cell_of_xy(0.15, 0.15), true);
  CHECK(diag.components().size() == 2);
}

TEST_CASE("inner boundary and closed complement close the split") {
  Grid g = Grid::angular(50);
  Region r = span(g, 10, 20);
  Region ib = r.inner_boundary();
  CHECK(ib.cells() == std::vector<int>{10, 19});
  Region cc = r.closed_complement();
  CHECK(cc.equals(r.complement().unite(ib)));
  // every valid cell is covered by the region or its closed complement
  CHECK(r.unite(cc).cell_count() == g.valid_cell_count());
}

TEST_CASE("angular intervals mirror the stored runs") {
  Grid g = Grid::angular(628);
  double w = g.cell_width();
  Region r = span(g, 0, 100).unite(span(g, 200, 210));
  auto ivs = r.angular_intervals();
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[0].first == doctest::Approx(0.0));
  CHECK(ivs[0].second == doctest::Approx(100 * w));
  CHECK(ivs[1].first == doctest::Approx(200 * w));
  CHECK(ivs[1].second == doctest::Approx(210 * w));
}

TEST_CASE("serialization round-trips and is deterministic") {
  Grid g = Grid::box(60, 60, 0.0, 3.0, -1.5, 1.5);
  g.has_blocked = true;
  g.bx0 = 0.8;
  g.bx1 = 1.3;
  g.by0 = -0.25;
  g.by1 = 0.25;
  Region r = random_region(g, 99, 0.4);

  std::string text = r.serialize();
  CHECK(text == r.serialize());
  Region back = Region::deserialize(text);
  CHECK(back.equals(r));
  CHECK(back.grid().same_geometry(g));

  auto path = (std::filesystem::temp_directory_path() / "hyrl_test_region.region").string();
  r.save(path);
  CHECK(Region::load(path).equals(r));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(Region::deserialize("not a region"), Error);
}

TEST_CASE("sampling stays inside the region and visits every cell") {
  Grid g = Grid::angular(400);
  Region r = span(g, 40, 44).unite(span(g, 300, 302));
  Rng rng(5);
  std::set<int> seen;
  for (int k = 0; k < 600; ++k) {
    Vec2 s = sample_state_in(r, rng);
    CHECK(r.contains(s));
    seen.insert(g.cell_of(s));
  }
  CHECK(seen.size() == 6);

  Region empty(g);
  CHECK_THROWS_AS(sample_state_in(empty, rng), Error);
}

TEST_CASE("region operations reject mismatched grids") {
  Region a(Grid::angular(100));
  Region b(Grid::angular(200));
  CHECK_THROWS_AS(a.unite(b), InvalidArgument);
  CHECK_THROWS_AS(a.intersect(b), InvalidArgument);
}
