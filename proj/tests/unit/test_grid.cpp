#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cohset/errors.hpp"
#include "cohset/grid.hpp"

using namespace cohset;

TEST_CASE("circle locate reduces mod 1") {
  const Grid g = Grid::circle(10);
  CHECK(g.locate(Point{0.0, 0}) == 0);
  CHECK(g.locate(Point{0.95, 0}) == 9);
  CHECK(g.locate(Point{1.05, 0}) == 0);
  CHECK(g.locate(Point{-0.05, 0}) == 9);
  CHECK(g.locate(Point{1.0, 0}) == 0);
}

TEST_CASE("cylinder locate wraps x and rejects y outside the walls") {
  const Grid g = Grid::cylinder(8, 4);
  CHECK(g.size() == 32);
  const double pi = std::numbers::pi;
  CHECK(g.locate(Point{0.1, 0.1}) == 0);
  CHECK(g.locate(Point{2 * pi + 0.1, 0.1}) == 0);
  CHECK(g.locate(Point{0.1, pi}) == g.flat_index(0, 3));  // closed upper wall
  CHECK_THROWS_AS(g.locate(Point{0.1, pi + 1e-3}), DomainError);
  CHECK_THROWS_AS(g.locate(Point{0.1, -1e-3}), DomainError);
  CHECK_THROWS_AS(g.locate(Point{NAN, 0.5}), DomainError);
}

TEST_CASE("test points are a midpoint lattice inside their box") {
  const Grid g1 = Grid::circle(6);
  const auto p = g1.test_points(2, 3);
  REQUIRE(p.size() == 3);
  CHECK(p[0][0] == doctest::Approx((2 + 1.0 / 6) / 6));
  CHECK(p[2][0] == doctest::Approx((2 + 5.0 / 6) / 6));

  const Grid g2 = Grid::cylinder(12, 6);
  for (std::size_t b : {0ul, 17ul, 71ul}) {
    const auto pts = g2.test_points(b, 25);
    CHECK(pts.size() == 25);
    for (const auto& q : pts) CHECK(g2.locate(q) == b);
  }
  CHECK_THROWS_AS(g2.test_points(0, 10), ConfigError);
  CHECK_THROWS_AS(g1.test_points(0, 0), ConfigError);
}

TEST_CASE("box sets, components and set algebra") {
  const Grid g = Grid::circle(10);
  const BoxSet wrap(g, {9, 0, 1});
  CHECK(components(wrap).size() == 1);
  const BoxSet two(g, {2, 3, 6});
  const auto comps = components(two);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].size() == 2);
  CHECK(comps[0].contains(2));
  CHECK(comps[1].contains(6));
  CHECK(two.measure() == doctest::Approx(0.3));
  CHECK(set_union(wrap, two).size() == 6);
  CHECK(set_intersection(wrap, two).empty());
  CHECK(symmetric_difference_size(wrap, BoxSet(g, {0, 1})) == 1);
  CHECK_THROWS_AS(BoxSet(g, {10}), DomainError);
  CHECK(BoxSet::full(g).measure() == 1.0);

  const Grid c = Grid::cylinder(4, 3);
  // x wraps, y does not
  CHECK(components(BoxSet(c, {c.flat_index(0, 0), c.flat_index(3, 0)})).size() == 1);
  CHECK(components(BoxSet(c, {c.flat_index(0, 0), c.flat_index(0, 2)})).size() == 2);
}
