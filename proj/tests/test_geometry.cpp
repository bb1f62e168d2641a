#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "closure/geometry.hpp"

using namespace closure;

namespace {

bool near(Point a, Point b, double tol) { return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol; }

// Every point of `a` has a partner in `b` within tol.
bool same_point_set(const std::vector<Point>& a, const std::vector<Point>& b, double tol) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](Point p) {
    return std::any_of(b.begin(), b.end(), [&](Point q) { return near(p, q, tol); });
  });
}

double total_length(const std::vector<Segment>& segs) {
  double sum = 0.0;
  for (const auto& s : segs) sum += s.length();
  return sum;
}

}  // namespace

TEST_CASE("square vertices start at the top and run counter-clockwise") {
  const auto v = polygon_vertices(4, 0.0, {112, 112}, 80);
  REQUIRE(v.size() == 4);
  CHECK(near(v[0], {112, 32}, 1e-9));
  CHECK(near(v[1], {32, 112}, 1e-9));
  CHECK(near(v[2], {112, 192}, 1e-9));
  CHECK(near(v[3], {192, 112}, 1e-9));
}

TEST_CASE("triangle vertices") {
  const auto v = polygon_vertices(3, 0.0, {112, 112}, 80);
  REQUIRE(v.size() == 3);
  CHECK(near(v[0], {112, 32}, 0.005));
  CHECK(near(v[1], {42.72, 152}, 0.005));
  CHECK(near(v[2], {181.28, 152}, 0.005));
}

TEST_CASE("square rotated by 90 degrees has the same vertex set") {
  CHECK(same_point_set(polygon_vertices(4, 0, {112, 112}, 80), polygon_vertices(4, 90, {112, 112}, 80), 1e-9));
  for (double base : {0.0, 15.0, 30.0, 45.0}) {
    for (int k = 1; k <= 3; ++k) {
      CHECK(same_point_set(polygon_vertices(4, base, {96, 128}, 80),
                           polygon_vertices(4, base + 90.0 * k, {96, 128}, 80), 1e-9));
    }
  }
}

TEST_CASE("vertices are equidistant and sides equal 2 r sin(180/n)") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> angle(0, 360);
  std::uniform_real_distribution<double> radius(5, 100);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = kMinSides + trial % (kMaxSides - kMinSides + 1);
    const double r = radius(rng);
    const Point c{150, 90};
    const auto v = polygon_vertices(n, angle(rng), c, r);
    const double side = 2 * r * std::sin(M_PI / n);
    for (int k = 0; k < n; ++k) {
      CHECK(std::hypot(v[k].x - c.x, v[k].y - c.y) == doctest::Approx(r).epsilon(1e-12));
      CHECK(Segment{v[k], v[(k + 1) % n]}.length() == doctest::Approx(side).epsilon(1e-12));
    }
  }
}

TEST_CASE("perimeter and side lengths do not depend on rotation") {
  for (int n = kMinSides; n <= kMaxSides; ++n) {
    const double p0 = perimeter(polygon_vertices(n, 0, {112, 112}, 80));
    for (double theta : rotation_schedule(n, RotationScheme::Uniform15)) {
      CHECK(perimeter(polygon_vertices(n, theta, {112, 112}, 80)) == doctest::Approx(p0).epsilon(1e-12));
    }
    for (double theta : rotation_schedule(n, RotationScheme::Formula)) {
      CHECK(perimeter(polygon_vertices(n, theta, {112, 112}, 80)) == doctest::Approx(p0).epsilon(1e-12));
    }
  }
}

TEST_CASE("invalid polygon inputs are rejected") {
  CHECK_THROWS_AS(polygon_vertices(2, 0, {0, 0}, 10), std::invalid_argument);
  CHECK_THROWS_AS(polygon_vertices(13, 0, {0, 0}, 10), std::invalid_argument);
  CHECK_THROWS_AS(polygon_vertices(5, 0, {0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(polygon_vertices(5, 0, {0, 0}, -3), std::invalid_argument);
  CHECK_THROWS_AS(rotation_schedule(2, RotationScheme::Uniform15), std::invalid_argument);
}

TEST_CASE("rotation schedules") {
  using Sched = std::array<double, 8>;
  for (int n = kMinSides; n <= kMaxSides; ++n) {
    CHECK(rotation_schedule(n, RotationScheme::Uniform15) == Sched{0, 15, 30, 45, 60, 75, 90, 105});
  }
  CHECK(rotation_schedule(3, RotationScheme::Formula) == Sched{0, 60, 120, 180, 240, 300, 0, 60});
  CHECK(rotation_schedule(12, RotationScheme::Formula) == Sched{0, 150, 300, 90, 240, 30, 180, 330});

  // Non-integer angles (n = 7) still land in [0, 360).
  for (int n = kMinSides; n <= kMaxSides; ++n) {
    const auto s = rotation_schedule(n, RotationScheme::Formula);
    for (int i = 0; i < 8; ++i) {
      CHECK(s[i] >= 0.0);
      CHECK(s[i] < 360.0);
      const double raw = 180.0 * (n - 2) * i / n;
      CHECK(std::abs(std::remainder(raw - s[i], 360.0)) < 1e-9);
    }
  }
}

TEST_CASE("side_segments on a single horizontal side") {
  // A degenerate two-vertex "polygon" would be rejected, so use a triangle
  // whose first side is (0,0)->(100,0) and inspect the first side's pieces.
  const std::vector<Point> tri{{0, 0}, {100, 0}, {50, 80}};

  auto s0 = side_segments(tri, 0);
  REQUIRE(s0.size() == 3);
  CHECK(s0[0].p0 == Point{0, 0});
  CHECK(s0[0].p1 == Point{100, 0});

  auto s50 = side_segments(tri, 50);
  REQUIRE(s50.size() == 6);
  CHECK(near(s50[0].p0, {0, 0}, 0));
  CHECK(near(s50[0].p1, {25, 0}, 1e-12));
  CHECK(near(s50[1].p0, {75, 0}, 1e-12));
  CHECK(near(s50[1].p1, {100, 0}, 0));

  auto s90 = side_segments(tri, 90);
  CHECK(near(s90[0].p1, {5, 0}, 1e-12));
  CHECK(near(s90[1].p0, {95, 0}, 1e-12));
}

TEST_CASE("side_segments rejects removal levels outside the design") {
  const auto v = polygon_vertices(5, 0, {112, 112}, 80);
  for (int bad : {-10, 5, 15, 95, 100}) CHECK_THROWS_AS(side_segments(v, bad), std::invalid_argument);
}

TEST_CASE("property: retained length is (1 - p/100) of the perimeter") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> angle(0, 360);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = kMinSides + static_cast<int>(rng() % 10);
    const int p = kRemovalLevels[rng() % kRemovalLevels.size()];
    const auto v = polygon_vertices(n, angle(rng), {112, 112}, 80);
    const double expected = (1.0 - p / 100.0) * perimeter(v);
    const double got = total_length(side_segments(v, p));
    CHECK(std::abs(got - expected) / expected < 1e-9);
  }
}

TEST_CASE("property: every side keeps both of its vertices as exact endpoints") {
  for (int n = kMinSides; n <= kMaxSides; ++n) {
    const auto v = polygon_vertices(n, 37.5, {100, 120}, 60);
    for (int p : kRemovalLevels) {
      const auto segs = side_segments(v, p);
      for (int k = 0; k < n; ++k) {
        const Point a = v[k];
        const Point b = v[(k + 1) % n];
        if (p == 0) {
          CHECK(segs[k].p0 == a);
          CHECK(segs[k].p1 == b);
        } else {
          CHECK(segs[2 * k].p0 == a);
          CHECK(segs[2 * k + 1].p1 == b);
          // Two equal pieces, gap centered on the side.
          CHECK(segs[2 * k].length() == doctest::Approx(segs[2 * k + 1].length()).epsilon(1e-12));
        }
      }
      for (const auto& s : segs) CHECK(s.length() > 0.0);
    }
  }
}

TEST_CASE("PolygonSpec validation and canvas fit") {
  PolygonSpec spec;
  spec.center = {112, 112};
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.fits_canvas(224, 224));

  spec.center = {96, 128};  // offset position
  CHECK(spec.fits_canvas(224, 224));

  spec.circumradius_px = 112;
  spec.center = {112, 112};
  CHECK_FALSE(spec.fits_canvas(224, 224));  // stroke pokes out by 1 px

  PolygonSpec bad;
  bad.n_sides = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.n_sides = 5;
  bad.removal_pct = 25;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("enum names round-trip") {
  CHECK(parse_background(to_string(Background::Dark)) == Background::Dark);
  CHECK(parse_rotation_scheme(to_string(RotationScheme::Formula)) == RotationScheme::Formula);
  CHECK_THROWS_AS(parse_rotation_scheme("spiral"), std::invalid_argument);
}
