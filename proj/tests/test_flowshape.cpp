#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liftlab/flowshape.hpp"

#include <cmath>
#include <numbers>

using namespace liftlab;

namespace {

FlowProfile sine_odd(double H = 1) {
  return FlowProfile::from_function(H, FlowProfile::kDefaultNodes, [](double x) { return std::sin(2 * std::numbers::pi * x); });
}

FlowProfile with_odd(const FlowProfile& odd) { return renormalize_flux(poiseuille(odd.H()).sampled() + odd); }

}  // namespace

TEST_CASE("baseline profiles: endpoints, unit flux, norms") {
  for (double H : {0.5, 1.0, 2.0}) {
    const FlowProfile p = poiseuille(H), c = couette(H);
    CHECK(p(-H) == doctest::Approx(0).epsilon(1e-15));
    CHECK(p(H) == doctest::Approx(0).epsilon(1e-15));
    CHECK(c(-H) == doctest::Approx(0).epsilon(1e-15));
    CHECK(c(H) == doctest::Approx(1));
    CHECK(flux(p) == doctest::Approx(1).epsilon(1e-14));
    CHECK(flux(c) == doctest::Approx(1).epsilon(1e-14));
    // sup|V| = 3/(4H) at 0, sup|V'| = 3/(2H^2) at the walls.
    CHECK(w1inf_norm(p) == doctest::Approx(3 / (4 * H) + 3 / (2 * H * H)).epsilon(1e-12));
  }
}

TEST_CASE("renormalize_flux fixes the flux of sampled profiles") {
  const FlowProfile s = poiseuille(1).sampled();
  CHECK(std::abs(flux(s) - 1) > 1e-6);
  const FlowProfile r = renormalize_flux(s);
  CHECK(std::abs(flux(r) - 1) <= 1e-14);
  CHECK(r.nodes()(0) == s.nodes()(0));
  CHECK(r.nodes()(r.size() - 1) == s.nodes()(s.size() - 1));
}

TEST_CASE("even/odd split recombines and has the right parity") {
  const FlowProfile v = with_odd(0.3 * sine_odd());
  const auto [e, o] = even_odd_split(v);
  CHECK((e.nodes() + o.nodes() - v.nodes()).cwiseAbs().maxCoeff() <= 1e-15);
  for (int i = 0; i < v.size(); ++i) {
    CHECK(e.nodes()(i) == e.nodes()(v.size() - 1 - i));
    CHECK(o.nodes()(i) == -o.nodes()(v.size() - 1 - i));
  }
}

TEST_CASE("odd zeros of sin(2 pi x) are -1/2, 0, 1/2") {
  const OddZeros z = find_odd_zeros(sine_odd());
  REQUIRE(z.zeros.size() == 3);
  CHECK(z.zeros[0] == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(z.zeros[1] == doctest::Approx(0).epsilon(1e-12));
  CHECK(z.zeros[2] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(find_odd_zeros(FlowProfile::zero(1)).identically_zero);
}

TEST_CASE("reflect_flow is an involution") {
  const FlowShapePair p{with_odd(0.3 * sine_odd()), with_odd(-0.1 * sine_odd()), 0};
  const FlowShapePair q = reflect_flow(reflect_flow(p));
  CHECK(q.v_in.nodes() == p.v_in.nodes());
  CHECK(q.v_out.nodes() == p.v_out.nodes());
}

TEST_CASE("flow homotopy at delta = 1/2 flips the outer lobes of sin(2 pi x)") {
  const FlowShapePair p{with_odd(sine_odd()), with_odd(sine_odd()), 0};
  const FlowShapePair m = flow_homotopy(p, 0.5, {25, 0});
  const auto [e, o] = even_odd_split(m.v_in);
  const FlowProfile s = sine_odd();
  for (int i = 0; i < s.size(); ++i) {
    const double x = s.x(i);
    const double expect = std::abs(x) >= 0.5 ? -s.nodes()(i) : s.nodes()(i);
    CHECK(o.nodes()(i) == doctest::Approx(expect).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("flow homotopy keeps endpoints, flux, class and a nonzero odd part") {
  const FlowClassParams C{25, 0};
  for (const FlowProfile& odd : {sine_odd(), FlowProfile::from_function(1, 129, [](double x) { return 0.4 * (1 - x * x) * x; })}) {
    const FlowShapePair p{with_odd(odd), with_odd(0.5 * odd), 0};
    REQUIRE(is_admissible_flow(p, C));
    for (int i = 0; i <= 40; ++i) {
      const FlowShapePair q = flow_homotopy(p, i / 40.0, C);
      CHECK(is_admissible_flow(q, C));
      CHECK(std::abs(flux(q.v_in) - 1) <= 1e-14);
      CHECK(q.v_in.nodes()(0) == doctest::Approx(0).scale(1));
      const auto oz = find_odd_zeros(even_odd_split(q.v_in).second);
      CHECK_FALSE(oz.identically_zero);
    }
  }
}

TEST_CASE("flow homotopy enforces the norm budget by shrinking the odd part") {
  const FlowShapePair p{with_odd(sine_odd()), with_odd(sine_odd()), 0};
  const double r = w1inf_norm(p) * 1.0001;
  for (int i = 0; i <= 20; ++i) CHECK(w1inf_norm(flow_homotopy(p, i / 20.0, {r, 0})) <= r * (1 + 1e-12));
}

TEST_CASE("flow homotopy rejects even pairs and U = 1") {
  const FlowShapePair even{poiseuille(1), poiseuille(1), 0};
  CHECK_THROWS_AS(flow_homotopy(even, 0.5, {6, 0}), InvalidArgument);
  const FlowShapePair c{couette(1), couette(1), 1};
  CHECK_THROWS_AS(flow_homotopy(c, 0.5, {6, 1}), InvalidArgument);
}

TEST_CASE("class validation") {
  CHECK_THROWS_AS(validate(FlowClassParams{1.0, 0}, 1.0), InvalidArgument);
  CHECK_NOTHROW(validate(FlowClassParams{6.0, 0}, 1.0));
  const Report r = is_admissible_flow({poiseuille(1), 2.0 * poiseuille(1), 0}, {100, 0});
  CHECK_FALSE(r.ok());
}
