#include <doctest.h>

#include <cmath>

#include "decmhd/grid.hpp"

using namespace decmhd;

TEST_CASE("wrap folds negative and large indices") {
  CHECK(wrap(-1, 4) == 3);
  CHECK(wrap(4, 4) == 0);
  CHECK(wrap(9, 4) == 1);
  CHECK(wrap(-9, 4) == 3);
}

TEST_CASE("make_grid spacing and coordinates") {
  const Grid g = make_grid(8, 4, 2.0, 1.0, -1.0, -0.5);
  CHECK(g.hx == doctest::Approx(0.25));
  CHECK(g.hy == doctest::Approx(0.25));
  CHECK(g.size() == 32u);
  CHECK(g.x(0) == doctest::Approx(-1.0));
  CHECK(g.x_half(0) == doctest::Approx(-0.875));
  CHECK(g.y_half(3) == doctest::Approx(0.375));
  CHECK(g.index(0, 1) == 8u);
  CHECK(g.index(-1, -1) == g.index(7, 3));
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(1, 4, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 4, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 4, 1.0, -2.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 4, std::nan(""), 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(4, 4, 1.0, 1.0, INFINITY), InvalidArgument);
}

TEST_CASE("Array2 storage and arithmetic") {
  const Grid g = make_grid(3, 2, 3.0, 2.0);
  Array2 a(g, 1.0);
  a(2, 1) = -4.0;
  CHECK(a.data()[5] == -4.0);
  CHECK(a.at(-1, -1) == -4.0);
  CHECK(a.max_abs() == 4.0);
  Array2 b = 2.0 * a;
  b -= a;
  CHECK(b == a);
  CHECK((a + a)(2, 1) == -8.0);
  CHECK((a - a).max_abs() == 0.0);
  a(0, 0) = std::nan("");
  CHECK_FALSE(a.all_finite());
  CHECK_THROWS_AS(a += Array2(2, 2), InvalidArgument);
  CHECK_THROWS_AS(require_shape(Array2(2, 2), g, "x"), InvalidArgument);
}
