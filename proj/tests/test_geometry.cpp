#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liftlab/geometry.hpp"

#include <random>

using namespace liftlab;

namespace {

const Trapezium P{0.6, 0.15, 0.3};

// Brute-force oracle: sample both boundaries densely and take the directed
// sup of the distance to the other filled polygon.
double sampled_hausdorff(const Body& a, const Body& b, int samples) {
  auto directed = [samples](const Body& from, const Body& to) {
    const double per = perimeter(from) / samples;
    double d = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      const Vec2 p = from[i], q = from.vertex(static_cast<std::ptrdiff_t>(i) + 1);
      const int k = std::max(1, static_cast<int>((q - p).norm() / per));
      for (int j = 0; j <= k; ++j) d = std::max(d, set_distance(to, Vec2(p + (q - p) * (double(j) / k))));
    }
    return d;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Area by triangle fan from an interior point, independent of the shoelace sum.
double fan_area(const Body& b) {
  const Vec2 c = (b[0] + b[1] + b[2]) / 3;
  double s = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vec2 p = b[i] - c, q = b.vertex(static_cast<std::ptrdiff_t>(i) + 1) - c;
    s += 0.5 * std::abs(p.x() * q.y() - p.y() * q.x());
  }
  return s;
}

}  // namespace

TEST_CASE("vertices are canonicalized: ccw, lexicographic start, collinear points dropped") {
  const Body b({{1, 1}, {0, 1}, {0, 0}, {0.5, 0}, {1, 0}});
  REQUIRE(b.size() == 4);
  CHECK(b[0] == Vec2(0, 0));
  CHECK(polygon_area(b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(Body({{0, 0}, {1, 1}, {2, 2}}), InvalidArgument);
}

TEST_CASE("shoelace area matches a triangle fan") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 12; ++i) pts.emplace_back(u(rng), u(rng));
    const Body h = convex_hull(pts);
    CHECK(polygon_area(h) == doctest::Approx(fan_area(h)).epsilon(1e-13));
  }
}

TEST_CASE("body family keeps the area 4lh + h gamma") {
  const double alpha = 4 * P.l * P.h + P.h * P.gamma;
  for (int i = 0; i <= 10; ++i) {
    const Body b = body_family(i / 10.0, P);
    CHECK(is_convex(b));
    CHECK(std::abs(polygon_area(b) - alpha) <= 1e-13 * alpha);
    CHECK(std::abs(fan_area(b) - alpha) <= 1e-13 * alpha);
  }
}

TEST_CASE("body family vertex counts and endpoints") {
  CHECK(body_family(0.0, P).size() == 4);
  CHECK(body_family(0.3, P).size() == 5);
  CHECK(body_family(0.8, P).size() == 5);
  CHECK(hausdorff_distance(body_family(1.0, P), reflect_body(body_family(0.0, P))) == 0.0);
  const Body b = body_family(2.0 / 3, P);
  const Body listed({{-P.l, -P.h}, {-P.l, P.h}, {P.l + 3 * P.gamma / 5, P.h}, {P.l + 3 * P.gamma / 5, -P.h / 3}, {P.l, -P.h}});
  REQUIRE(b.size() == listed.size());
  for (std::size_t i = 0; i < b.size(); ++i) CHECK((b[i] - listed[i]).norm() <= 1e-15);
  CHECK_THROWS_AS(body_family(1.5, P), InvalidArgument);
}

TEST_CASE("homotopy denominator stays positive past 2/3") {
  for (int i = 0; i <= 1000; ++i) {
    const double e = 2.0 / 3 + i / 3000.0;
    CHECK(15 * e - 9 * e * e - 1 > 0);
  }
}

TEST_CASE("hausdorff distance agrees with a 10^4-sample brute force") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> a, b;
    for (int i = 0; i < 8; ++i) a.emplace_back(u(rng), u(rng)), b.emplace_back(u(rng) + 0.3, u(rng));
    const Body A = convex_hull(a), B = convex_hull(b);
    const double exact = hausdorff_distance(A, B);
    const double sampled = sampled_hausdorff(A, B, 10000);
    const double spacing = std::max(perimeter(A), perimeter(B)) / 10000;
    CHECK(sampled <= exact + 1e-12);
    CHECK(exact - sampled <= spacing);
  }
}

TEST_CASE("hausdorff distance is a metric on samples") {
  const Body a = trapezium(P), b = centered_rectangle(0.5, 0.2), c = translate(a, Vec2(0.1, -0.05));
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
  CHECK(hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-15);
  CHECK(hausdorff_distance(a, c) == doctest::Approx(std::hypot(0.1, 0.05)));
}

TEST_CASE("reflection is an involution and preserves area") {
  const Body b = body_family(0.37, P);
  CHECK(reflect_body(reflect_body(b)) == b);
  CHECK(polygon_area(reflect_body(b)) == doctest::Approx(polygon_area(b)).epsilon(1e-15));
  CHECK(is_axis_symmetric(centered_rectangle(0.4, 0.1)));
  CHECK_FALSE(is_axis_symmetric(trapezium(P)));
}

TEST_CASE("clip and hull") {
  const Body big = centered_rectangle(3.0, 0.3);
  const Body clipped = clip_to_rect(big, Rectd{2, 0.5});
  CHECK(polygon_area(clipped) == doctest::Approx(4 * 2 * 0.3));
  const Body hull = convex_hull(std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  CHECK(hull.size() == 4);
}

TEST_CASE("admissibility reports each violation") {
  BodyClassd bc;
  bc.D = {2, 0.5};
  bc.alpha = 4 * P.l * P.h + P.h * P.gamma;
  CHECK(is_admissible_body(trapezium(P), bc).ok());
  const Report r = is_admissible_body(centered_rectangle(2.5, 0.01), bc);
  CHECK(r.violations.size() == 2);
  bc.alpha = 100;
  CHECK_THROWS_AS(validate(bc, Rectd{5, 1}), InvalidArgument);
  CHECK_THROWS_AS(validate(Trapezium{0.6, 0.7, 0.3}, Rectd{5, 1}), InvalidArgument);
}
