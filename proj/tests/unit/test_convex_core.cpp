#include <doctest.h>

#include "epirep/convex_core.hpp"
#include "epirep/errors.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace epirep;
using epirep::testing::random_polygon;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ConvexBody triangle() { return Polygon::hull({{0, 0}, {1, 0}, {0, 1}}); }

}  // namespace

TEST_CASE("support examples") {
  CHECK(support(Ball{v2(1, 2), 3}, v2(1, 0)) == doctest::Approx(4.0));
  CHECK(support(Polygon::box(0, 0, 2, 4), v2(0, 1)) == doctest::Approx(4.0));
  CHECK(support(triangle(), v2(1, 1) / std::sqrt(2.0)) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK_THROWS_AS(ConvexBody(Polygon{}), GeometryError);
  CHECK_THROWS_AS(ConvexBody(Ball{v2(0, 0), -1.0}), GeometryError);
}

TEST_CASE("distance examples") {
  CHECK(distance_to(Ball{v2(0, 0), 1}, v2(3, 0)) == doctest::Approx(2.0));
  CHECK(distance_to(triangle(), v2(0.2, 0.2)) == 0.0);
  CHECK(distance_to(triangle(), v2(1, 1)) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
}

TEST_CASE("clamp examples") {
  // anchor inside: singleton
  const auto in = clamp_intersection(triangle(), v2(0.1, 0.1));
  REQUIRE(in.polygon());
  CHECK(in.polygon()->size() == 1);
  CHECK(in.polygon()->vertices()[0].isApprox(Vec2(0.1, 0.1)));

  // unit disk seen from (3,0): radius 4 covers the disk (up to discretization)
  const auto disk = clamp_intersection(Ball{v2(0, 0), 1}, v2(3, 0));
  CHECK(disk.polygon()->size() >= 700);
  CHECK(hausdorff(disk, Ball{v2(0, 0), 1}) < 1e-4);

  // truncated vertical ray {0} x [0, 10] from (0, -2): {0} x [0, 2]
  const auto seg = clamp_intersection(Polygon::segment({0, 0}, {0, 10}), Vec2(0, -2));
  REQUIRE(seg.size() == 2);
  CHECK(seg.vertices()[0].isApprox(Vec2(0, 0)));
  CHECK(seg.vertices()[1].isApprox(Vec2(0, 2)));
}

TEST_CASE("steiner examples") {
  CHECK((steiner_point(Ball{v2(1, 2), 3}) - v2(1, 2)).norm() < 1e-12);
  CHECK((steiner_point(Polygon::box(0, 0, 2, 4)) - Vec2(1, 2)).norm() < 1e-12);
  const Vec2 s = steiner_point(*triangle().polygon());
  CHECK((s - Vec2(0.375, 0.375)).norm() < 1e-12);
  // second route: midpoint rule in the angle with 1e5 nodes
  CHECK((testing::steiner_by_angles(*triangle().polygon(), 100000) - s).norm() < 1e-6);
  // third route: the library's own quadrature from the support oracle
  const Vec q = steiner_point_quadrature(
      [](const Vec& u) { return support(triangle(), u); }, 2);
  CHECK((q - v2(0.375, 0.375)).norm() < 1e-6);
  // degenerate bodies
  CHECK(steiner_point(Polygon::segment({0, 0}, {0, 2})).isApprox(Vec2(0, 1)));
  CHECK(steiner_point(Polygon::point({3, 4})).isApprox(Vec2(3, 4)));
}

TEST_CASE("hausdorff examples") {
  CHECK(hausdorff(triangle(), triangle()) == 0.0);
  CHECK(hausdorff(Ball{v2(0, 0), 1}, Ball{v2(0, 0), 2}) == doctest::Approx(1.0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3), r(0, 2);
  for (int i = 0; i < 100; ++i) {
    const Vec x = v2(u(rng), u(rng)), y = v2(u(rng), u(rng));
    const double a = r(rng), b = r(rng);
    CHECK(hausdorff(Ball{x, a}, Ball{y, b}) <= (x - y).norm() + std::abs(a - b) + 1e-12);
  }
  // mixed ball/polygon goes through support sampling; compare to the disk polygon
  const auto disk = clamp_intersection(Ball{v2(0, 0), 1}, v2(3, 0));
  CHECK(hausdorff(ConvexBody(Ball{v2(0, 0), 1}), ConvexBody(Polygon::box(-1, -1, 1, 1))) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-6));
  (void)disk;
}

TEST_CASE("polygon hausdorff agrees with dense boundary sampling") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Polygon a = random_polygon(rng), b = random_polygon(rng);
    const double exact = hausdorff(a, b);
    const double sampled = testing::hausdorff_by_sampling(a, b, 200);
    CHECK(sampled <= exact + 1e-12);
    CHECK(exact - sampled < 1e-2 * (1.0 + exact));
  }
}

TEST_CASE("body invariants on random polygons") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) {
    const Polygon p = random_polygon(rng);
    const ConvexBody body(p);
    const Vec z = v2(u(rng), u(rng));
    const Vec q = nearest_point(body, z);
    CHECK(contains(body, q));
    const Vec a = v2(u(rng), u(rng)), b = v2(u(rng), u(rng));
    // support dominates members, convex and positively homogeneous
    CHECK(support(body, a) >= a.dot(q) - 1e-9);
    CHECK(support(body, a + b) <= support(body, a) + support(body, b) + 1e-9);
    CHECK(support(body, 2.5 * a) == doctest::Approx(2.5 * support(body, a)));
    // steiner point is a member
    CHECK(p.contains(steiner_point(p), 1e-9));
  }
}

TEST_CASE("translation equivariance") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Polygon p = random_polygon(rng);
    const Vec2 shift(1.25, -3.5), y(4.0, 1.0);
    CHECK((steiner_point(p.translated(shift)) - steiner_point(p) - shift).norm() < 1e-12);
    const Polygon c1 = clamp_intersection(p.translated(shift), y + shift);
    const Polygon c2 = clamp_intersection(p, y).translated(shift);
    CHECK(hausdorff(c1, c2) < 1e-9);
  }
}

TEST_CASE("steiner Lipschitz and clamp Lipschitz on random pairs") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> jitter(0.0, 0.05);
  std::uniform_real_distribution<double> u(-6, 6);
  double worst_s = 0.0, worst_p = 0.0;
  int used = 0;
  for (int i = 0; i < 300; ++i) {
    const Polygon k = random_polygon(rng);
    std::vector<Vec2> moved;
    for (const auto& v : k.vertices()) moved.emplace_back(v + Vec2(jitter(rng), jitter(rng)));
    const Polygon d = Polygon::hull(moved);
    const double h = hausdorff(k, d);
    if (h < 1e-3) continue;
    ++used;
    worst_s = std::max(worst_s, (steiner_point(k) - steiner_point(d)).norm() / h);
    const Vec2 x(u(rng), u(rng));
    const Vec2 y = x + Vec2(jitter(rng), jitter(rng));
    const double den = h + (x - y).norm();
    worst_p = std::max(worst_p, hausdorff(clamp_intersection(k, x), clamp_intersection(d, y)) / den);
  }
  CHECK(used > 200);
  CHECK(worst_s <= 2.0 * 1.05);
  CHECK(worst_p <= 5.0 * 1.05);
}

TEST_CASE("higher dimensional bodies") {
  Vec c(3);
  c << 1, -2, 0.5;
  const ConvexBody ball(Ball{c, 2.0});
  CHECK(steiner_point(ball).isApprox(c));
  // unit cube as a point hull
  PointHull cube;
  for (int i = 0; i < 8; ++i) {
    Vec p(3);
    p << (i & 1), (i >> 1) & 1, (i >> 2) & 1;
    cube.points.push_back(p);
  }
  const ConvexBody body(cube);
  Vec z(3);
  z << 2, 0.5, 0.5;
  CHECK(distance_to(body, z) == doctest::Approx(1.0).epsilon(1e-6));
  const Vec s = steiner_point(body);
  CHECK((s - Vec::Constant(3, 0.5)).norm() < 1e-2);
  CHECK_THROWS_AS(clamp_intersection(body, z), GeometryError);
}

// Half disk {|z| <= 1, y >= 0}: integrating u sigma(u) by hand gives (0, 1/pi).
TEST_CASE("exact disk clip steiner examples") {
  const Polygon upper = Polygon::box(-5.0, 0.0, 5.0, 5.0);
  const auto half = steiner_of_disk_clip(upper, Vec2(0.0, 0.0), 1.0);
  CHECK(half.point.x() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(half.point.y() == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(half.diameter == doctest::Approx(2.0));
  // disk inside the body, body inside the disk
  CHECK(steiner_of_disk_clip(upper, Vec2(1.0, 2.0), 0.5).point == Vec2(1.0, 2.0));
  const Polygon tri = Polygon::hull({Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)});
  CHECK((steiner_of_disk_clip(tri, Vec2(0.2, 0.2), 10.0).point - steiner_point(tri)).norm() < 1e-15);
  CHECK_THROWS_AS(steiner_of_disk_clip(tri, Vec2(5.0, 5.0), 1.0), GeometryError);
}

TEST_CASE("exact disk clip agrees with the discretized clip") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Polygon k = testing::random_polygon(rng, 1.0, 3 + i % 10);
    const Vec2 a = k.vertices()[0] + 2.0 * Vec2(u(rng), u(rng));
    if (k.contains(a)) continue;
    const auto exact = clamp_steiner(k, a);
    const Polygon fine = clamp_intersection(k, a, 1 << 15);
    const double r = 2.0 * k.distance(a);
    CHECK((exact.point - testing::steiner_by_angles(fine, 1 << 14)).norm() < 1e-6 * (1.0 + r));
    CHECK(exact.diameter == doctest::Approx(fine.diameter()).epsilon(1e-3));
  }
}
