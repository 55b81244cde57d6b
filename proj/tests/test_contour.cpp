#include <doctest.h>

#include <cmath>

#include "lens/contour.hpp"

using namespace lens;

TEST_SUITE("contour") {

TEST_CASE("unit circle is one closed loop") {
  const auto lines = marching_squares([](double x, double y) { return x * x + y * y - 1.0; },
                                      {-2.0, 2.0, -2.0, 2.0}, 200, 200);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  CHECK(lines[0].points.size() > 100);
  for (const auto& p : lines[0].points) CHECK(std::abs(std::hypot(p[0], p[1]) - 1.0) <= 1e-3);
}

TEST_CASE("straight line is one open chain spanning the window") {
  const auto lines = marching_squares([](double x, double) { return x - 0.3; }, {-1.0, 1.0, -1.0, 1.0}, 17, 23);
  REQUIRE(lines.size() == 1);
  CHECK_FALSE(lines[0].closed);
  for (const auto& p : lines[0].points) CHECK(p[0] == doctest::Approx(0.3).epsilon(1e-12));
  const double y0 = lines[0].points.front()[1], y1 = lines[0].points.back()[1];
  CHECK(std::abs(std::abs(y1 - y0) - 2.0) <= 1e-12);
}

TEST_CASE("two disjoint circles") {
  auto f = [](double x, double y) {
    return std::min(std::hypot(x - 1.0, y) - 0.5, std::hypot(x + 1.0, y) - 0.5);
  };
  const auto lines = marching_squares(f, {-2.0, 2.0, -1.0, 1.0}, 160, 80);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].closed);
  CHECK(lines[1].closed);
}

TEST_CASE("non-zero level and empty level sets") {
  const auto none = marching_squares([](double x, double y) { return x * x + y * y + 1.0; },
                                     {-1.0, 1.0, -1.0, 1.0}, 10, 10);
  CHECK(none.empty());
  const auto ring = marching_squares([](double x, double y) { return x * x + y * y; },
                                     {-1.0, 1.0, -1.0, 1.0}, 100, 100, 0.25);
  REQUIRE(ring.size() == 1);
  for (const auto& p : ring[0].points) CHECK(std::abs(std::hypot(p[0], p[1]) - 0.5) <= 1e-3);
}

TEST_CASE("saddle cells stay consistent") {
  // x*y = 0 crosses exactly at a vertex-free cell centre.
  const auto lines = marching_squares([](double x, double y) { return x * y; }, {-1.0, 1.0, -1.0, 1.0}, 3, 3);
  std::size_t points = 0;
  for (const auto& l : lines) {
    CHECK(l.points.size() >= 2);
    points += l.points.size();
  }
  CHECK(points >= 4);
}

}  // TEST_SUITE
