#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liftlab/lift.hpp"
#include "liftlab/ns_solver.hpp"

#include <memory>

using namespace liftlab;

namespace {

const Rectd R{5, 1};
const Trapezium P{0.6, 0.15, 0.3};

std::shared_ptr<const TaylorHoodSpace> space(double h, const std::optional<Body>& B) {
  return std::make_shared<const TaylorHoodSpace>(std::make_shared<const Mesh>(generate_mesh(R, B, h)));
}

FlowShapePair poiseuille_pair() { return {poiseuille(1), poiseuille(1), 0}; }

}  // namespace

TEST_CASE("Couette flow is reproduced exactly with constant pressure") {
  const auto V = space(0.25, std::nullopt);
  const FlowField F = solve_steady_ns(V, {0.7, {couette(1), couette(1), 1}}, SolverConfig{});
  double err = 0;
  for (int k = 0; k < V->num_p2(); ++k) {
    const double y = V->points()(1, k);
    err = std::max(err, (F.velocity.col(k) - Vec2(0.7 * (y + 1) / 2, 0)).cwiseAbs().maxCoeff());
  }
  CHECK(err <= 1e-11);
  CHECK(F.pressure.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("solutions are discretely divergence free with zero-mean pressure") {
  const auto V = space(1.0 / 6, trapezium(P));
  const FlowField F = solve_steady_ns(V, {0.5, poiseuille_pair()}, SolverConfig{});
  CHECK(F.residual <= 1e-10);
  CHECK(divergence_residual(F) <= 1e-11);
  CHECK(std::abs(pressure_mean(F)) <= 1e-12);
}

TEST_CASE("warm start reaches the same solution") {
  const auto V = space(0.25, trapezium(P));
  const SolverConfig cfg;
  const FlowField a = solve_steady_ns(V, {1.0, poiseuille_pair()}, cfg);
  const FlowField w = solve_steady_ns(V, {0.8, poiseuille_pair()}, cfg);
  const FlowField b = solve_steady_ns(V, {1.0, poiseuille_pair()}, cfg, &w);
  CHECK((a.velocity - b.velocity).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("solver config validation lists every bad field") {
  SolverConfig c;
  c.newton_tol = -1;
  c.pivot_tol = 2;
  try {
    validate(c);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("newton_tol") != std::string::npos);
    CHECK(msg.find("pivot_tol") != std::string::npos);
  }
}

TEST_CASE("frozen-convection lift functional is linear in (u, p)") {
  const auto V = space(0.25, trapezium(P));
  const FlowField a = solve_steady_ns(V, {0.4, poiseuille_pair()}, SolverConfig{});
  const FlowField b = solve_steady_ns(V, {0.9, poiseuille_pair()}, SolverConfig{});
  const Eigen::Matrix2Xd& adv = a.velocity;
  const double s = 1.7, t = -0.3;
  const double lhs = lift_volume_frozen(*V, s * a.velocity + t * b.velocity, s * a.pressure + t * b.pressure, adv);
  const double rhs = s * lift_volume_frozen(*V, a.velocity, a.pressure, adv) + t * lift_volume_frozen(*V, b.velocity, b.pressure, adv);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  // With the solution's own convection the frozen form is the lift.
  CHECK(lift_volume_frozen(*V, a.velocity, a.pressure, adv) == doctest::Approx(lift_volume(a)).epsilon(1e-12));
}

TEST_CASE("volume lift does not depend on the test-field extension") {
  const auto V = space(1.0 / 6, trapezium(P));
  const FlowField F = solve_steady_ns(V, {0.5, poiseuille_pair()}, SolverConfig{});
  const double l0 = volume_force(F, body_test_field(*V, Vec2(0, 1), 0));
  const double l2 = volume_force(F, body_test_field(*V, Vec2(0, 1), 2));
  CHECK(std::abs(l0 - l2) <= 1e-10 * std::abs(l0));
  CHECK(l0 == doctest::Approx(lift_volume(F)));
}

TEST_CASE("lift changes sign under reflection") {
  MeshOptions o;
  o.h = 0.25;
  const Mesh M = generate_mesh(R, trapezium(P), o);
  const double a = lift_volume(solve_steady_ns(M, {0.5, poiseuille_pair()}, SolverConfig{}));
  const double b = lift_volume(solve_steady_ns(reflect_mesh(M), {0.5, poiseuille_pair()}, SolverConfig{}));
  CHECK(std::abs(a + b) <= 1e-10 * std::abs(a));
  CHECK(std::abs(a) > 1e-3);
}

TEST_CASE("boundary and volume lift agree roughly on a fine body mesh") {
  MeshOptions o;
  o.h = 0.125;
  o.body_h = 0.0625;
  const FlowField F = solve_steady_ns(generate_mesh(R, trapezium(P), o), {0.5, poiseuille_pair()}, SolverConfig{});
  CHECK(std::abs(lift_boundary(F) - lift_volume(F)) <= 0.1 * std::abs(lift_volume(F)));
}

TEST_CASE("lift curve: zero at lambda 0, dedup, warm and cold agree") {
  const Mesh M = generate_mesh(R, trapezium(P), 0.25);
  const LiftCurve warm = lift_curve(M, poiseuille_pair(), {0.5, 0.25, 0.5, 1.0}, SolverConfig{});
  REQUIRE(warm.lambdas.size() == 4);
  CHECK(warm.lambdas[0] == 0.0);
  CHECK(warm.lifts[0] == 0.0);
  CHECK_FALSE(warm.truncated);
  LiftCurveOptions opt;
  opt.warm_start = false;
  opt.threads = 2;
  const LiftCurve cold = lift_curve(M, poiseuille_pair(), {0.25, 0.5, 1.0}, SolverConfig{}, opt);
  for (std::size_t i = 0; i < 4; ++i) CHECK(cold.lifts[i] == doctest::Approx(warm.lifts[i]).epsilon(1e-8));
  CHECK(warm.sup_norm() == std::abs(warm.lifts[warm.argmax()]));
  CHECK_THROWS_AS(lift_curve(M, poiseuille_pair(), {-1.0}, SolverConfig{}), InvalidArgument);
}

TEST_CASE("energy grows linearly at small lambda") {
  const auto V = space(0.25, trapezium(P));
  const double e1 = dirichlet_energy(solve_steady_ns(V, {0.05, poiseuille_pair()}, SolverConfig{}));
  const double e2 = dirichlet_energy(solve_steady_ns(V, {0.1, poiseuille_pair()}, SolverConfig{}));
  CHECK(e2 / e1 == doctest::Approx(2.0).epsilon(1e-3));
}
