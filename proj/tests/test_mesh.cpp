#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liftlab/mesh.hpp"

using namespace liftlab;

namespace {

const Rectd R{5, 1};
const Trapezium P{0.6, 0.15, 0.3};

double total_area(const Mesh& M) {
  double s = 0;
  for (int t = 0; t < M.num_triangles(); ++t) s += signed_area(M, t);
  return s;
}

}  // namespace

TEST_CASE("empty channel gives a valid structured grid") {
  const Mesh M = generate_mesh(R, std::nullopt, 0.25);
  CHECK(validate_mesh(M).ok());
  CHECK(total_area(M) == doctest::Approx(R.area()).epsilon(1e-13));
  CHECK(boundary_length(M, BoundaryTag::GammaLeft) == doctest::Approx(2.0));
  CHECK(boundary_length(M, BoundaryTag::GammaTop) == doctest::Approx(10.0));
}

TEST_CASE("obstacle mesh: area, body perimeter, quality") {
  const Body B = trapezium(P);
  MeshOptions o;
  o.h = 1.0 / 6;
  const Mesh M = generate_mesh(R, B, o);
  CHECK(validate_mesh(M).ok());
  CHECK(total_area(M) == doctest::Approx(R.area() - polygon_area(B)).epsilon(1e-12));
  CHECK(boundary_length(M, BoundaryTag::BodyBoundary) == doctest::Approx(perimeter(B)).epsilon(1e-12));
  const MeshQuality q = mesh_quality(M);
  CHECK(q.min_angle_deg >= 20.0);
  CHECK(q.h_max <= 1.5 * o.h);
  for (int i = 0; i < M.num_nodes(); ++i) CHECK((!contains(B, M.node(i), -1e-12) || boundary_distance(B, M.node(i)) < 1e-12));
}

TEST_CASE("generation is deterministic") {
  MeshOptions o;
  o.h = 0.2;
  CHECK(fingerprint(generate_mesh(R, trapezium(P), o)) == fingerprint(generate_mesh(R, trapezium(P), o)));
}

TEST_CASE("reflect_mesh is an involution and mirror mode is symmetric") {
  MeshOptions o;
  o.h = 0.2;
  const Mesh M = generate_mesh(R, trapezium(P), o);
  const Mesh MM = reflect_mesh(reflect_mesh(M));
  CHECK(fingerprint(MM) == fingerprint(M));
  CHECK(validate_mesh(reflect_mesh(M)).ok());

  o.mirror = true;
  const Mesh S = generate_mesh(R, centered_rectangle(0.5, 0.1), o);
  CHECK(S.mirror_symmetric);
  CHECK(validate_mesh(S).ok());
  // Every node has a mirror partner.
  for (int i = 0; i < S.num_nodes(); ++i) {
    const Vec2 m(S.node(i).x(), -S.node(i).y());
    bool found = false;
    for (int j = 0; j < S.num_nodes() && !found; ++j) found = (S.node(j) - m).norm() <= 1e-14;
    CHECK(found);
  }
  CHECK_THROWS_AS(generate_mesh(R, trapezium(P), o), InvalidArgument);
}

TEST_CASE("bad options are rejected") {
  MeshOptions o;
  o.h = 2.0;
  CHECK_THROWS_AS(generate_mesh(R, trapezium(P), o), InvalidArgument);
  o.h = -1;
  CHECK_THROWS_AS(generate_mesh(R, trapezium(P), o), InvalidArgument);
  CHECK_THROWS_AS(generate_mesh(R, translate(trapezium(P), Vec2(4.8, 0)), 0.1), InvalidArgument);
}

TEST_CASE("boundary tag names round trip") {
  for (int t = 0; t < kNumBoundaryTags; ++t) {
    const auto tag = static_cast<BoundaryTag>(t);
    CHECK(boundary_tag_from_string(to_string(tag)) == tag);
  }
  CHECK_THROWS_AS(boundary_tag_from_string("nope"), InvalidArgument);
}

TEST_CASE("morphing along the body family keeps a valid mesh") {
  MeshOptions o;
  o.h = 1.0 / 6;
  const Body ref = body_family(0.5, P);
  const Mesh M = generate_mesh(R, ref, o);
  auto anchors = [](double e) {
    const auto s = body_family_slots(e, P);
    return std::vector<Vec2>{s[0], s[1], s[2], s[3], s[5]};
  };
  for (double e : {0.45, 0.55, 0.6}) {
    const Body target = body_family(e, P);
    const Mesh X = morph_mesh(M, target, anchored_boundary_map(ref, target, anchors(0.5), anchors(e)));
    CHECK(validate_mesh(X).ok());
    CHECK(boundary_length(X, BoundaryTag::BodyBoundary) == doctest::Approx(perimeter(target)).epsilon(1e-12));
  }
  // The identity map leaves the nodes in place.
  const Mesh I = morph_mesh(M, ref, [](const Vec2& p) { return p; });
  CHECK((I.nodes - M.nodes).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("anchored map rejects degenerate arcs") {
  const Body a = body_family(0.5, P), b = body_family(0.0, P);
  const auto sa = body_family_slots(0.5, P), sb = body_family_slots(0.0, P);
  CHECK_THROWS_AS(anchored_boundary_map(a, b, {sa[0], sa[1], sa[2], sa[3], sa[5]}, {sb[0], sb[1], sb[2], sb[3], sb[5]}),
                  InvalidArgument);
}
