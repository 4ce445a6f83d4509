#include "liftlab/acceptance.hpp"

#include "liftlab/flowshape.hpp"
#include "liftlab/geometry.hpp"
#include "liftlab/lift.hpp"
#include "liftlab/mesh.hpp"
#include "liftlab/ns_solver.hpp"
#include "liftlab/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>

namespace liftlab {

namespace {

const Rectd kChannel{5, 1};
const Trapezium kTrapezium{0.6, 0.15, 0.3};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FlowProfile with_odd(double H, double a) {
  return renormalize_flux(poiseuille(H).sampled() +
                          FlowProfile::from_function(H, FlowProfile::kDefaultNodes, [H, a](double x) {
                            const double s = x / H;
                            return a * (1 - s * s) * s;
                          }));
}

CheckResult exact_solution() {
  const double H = kChannel.half_height, lambda = 1;
  const Mesh M = generate_mesh(kChannel, std::nullopt, H / 8);
  const FlowShapePair P{poiseuille(H), poiseuille(H), 0};
  const FlowField F = solve_steady_ns(M, {lambda, P}, SolverConfig{});
  const auto& pts = F.space->points();
  double du = 0, umax = 0;
  for (int k = 0; k < pts.cols(); ++k) {
    const double y = pts(1, k);
    const Vec2 exact(lambda * 3 * (H * H - y * y) / (4 * H * H * H), 0);
    du = std::max(du, (F.velocity.col(k) - exact).cwiseAbs().maxCoeff());
    umax = std::max(umax, exact.cwiseAbs().maxCoeff());
  }
  // -lap u + grad p = 0 with zero-mean pressure on the symmetric channel.
  const double slope = -lambda * 3 / (2 * H * H * H);
  double dp = 0, pmax = 0;
  for (int v = 0; v < M.num_nodes(); ++v) {
    const double exact = slope * M.node(v).x();
    dp = std::max(dp, std::abs(F.pressure(v) - exact));
    pmax = std::max(pmax, std::abs(exact));
  }
  const double eu = du / umax, ep = dp / pmax;
  return {eu <= 1e-9 && ep <= 1e-9, fmt("velocity rel err %.2e, pressure rel err %.2e (<= 1e-9)", eu, ep)};
}

CheckResult zero_lift_baseline() {
  const double lambda = 0.5;
  MeshOptions o;
  o.h = 1.0 / 8;
  o.mirror = true;
  const Mesh M = generate_mesh(kChannel, centered_rectangle(0.6, 0.15), o);
  const FlowShapePair P{poiseuille(1), poiseuille(1), 0};
  const FlowField F = solve_steady_ns(M, {lambda, P}, SolverConfig{});
  const double lift = lift_volume(F), drag = drag_volume(F);
  // Dynamic scale: |drag| per unit flow magnitude.
  const double bound = 1e-8 * lambda * (std::abs(drag) / lambda);
  return {M.mirror_symmetric && std::abs(lift) <= bound,
          fmt("|lift| %.2e <= %.2e (drag %.4f, mirrored mesh %s)", std::abs(lift), bound, drag,
              M.mirror_symmetric ? "yes" : "no")};
}

CheckResult reflection_antisymmetry() {
  const double lambda = 0.5;
  MeshOptions o;
  o.h = 1.0 / 6;
  const Mesh M = generate_mesh(kChannel, trapezium(kTrapezium), o);
  const FlowShapePair P{with_odd(1, 0.2), with_odd(1, -0.1), 0};
  const double a = lift_volume(solve_steady_ns(M, {lambda, P}, SolverConfig{}));
  const double b = lift_volume(solve_steady_ns(reflect_mesh(M), {lambda, reflect_flow(P)}, SolverConfig{}));
  const double rel = std::abs(a + b) / std::max(std::abs(a), std::abs(b));
  return {rel <= 1e-10, fmt("lifts %.6e, %.6e; |sum|/max %.2e <= 1e-10", a, b, rel)};
}

CheckResult homotopy_geometry() {
  const double l = kTrapezium.l, h = kTrapezium.h, g = kTrapezium.gamma;
  const double alpha = 4 * l * h + h * g;
  double worst = 0;
  for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(polygon_area(body_family(i / 100.0, kTrapezium)) - alpha) / alpha);
  const Body listed({{-l, -h}, {-l, h}, {l + 3 * g / 5, h}, {l + 3 * g / 5, -h / 3}, {l, -h}});
  const Body b23 = body_family(2.0 / 3, kTrapezium);
  double vdiff = b23.size() == listed.size() ? 0 : INFINITY;
  for (std::size_t i = 0; i < std::min(b23.size(), listed.size()); ++i)
    vdiff = std::max(vdiff, (b23[i] - listed[i]).cwiseAbs().maxCoeff());
  const double d1 = hausdorff_distance(body_family(1.0, kTrapezium), reflect_body(trapezium(kTrapezium)));
  return {worst <= 1e-12 && vdiff <= 1e-14 && d1 <= 1e-14,
          fmt("area rel err %.2e (<= 1e-12), B(2/3) vertex err %.2e (<= 1e-14), d_H(B1, reflect B0) %.2e", worst, vdiff,
              d1)};
}

CheckResult flow_homotopy_contract() {
  const double H = 1;
  auto prof = [&] {
    return renormalize_flux(poiseuille(H).sampled() +
                            FlowProfile::from_function(H, FlowProfile::kDefaultNodes, [](double x) {
                              return std::sin(2 * std::numbers::pi * x);
                            }));
  };
  const FlowShapePair P{prof(), prof(), 0};
  const FlowClassParams C{25, 0};
  if (!is_admissible_flow(P, C)) return {false, "base pair not admissible"};
  const FlowShapePair Q = reflect_flow(P);
  double flux_dev = 0;
  int inadmissible = 0;
  bool ends = true;
  for (int i = 0; i <= 100; ++i) {
    const FlowShapePair X = flow_homotopy(P, i / 100.0, C);
    flux_dev = std::max({flux_dev, std::abs(flux(X.v_in) - 1), std::abs(flux(X.v_out) - 1)});
    if (!is_admissible_flow(X, C)) ++inadmissible;
    if (i == 0) ends = ends && X.v_in.nodes() == P.v_in.nodes() && X.v_out.nodes() == P.v_out.nodes();
    if (i == 100) ends = ends && X.v_in.nodes() == Q.v_in.nodes() && X.v_out.nodes() == Q.v_out.nodes();
  }
  return {flux_dev <= 1e-14 && inadmissible == 0 && ends,
          fmt("flux dev %.2e (<= 1e-14), inadmissible %d of 101, endpoints exact %s", flux_dev, inadmissible,
              ends ? "yes" : "no")};
}

CheckResult bolzano() {
  const FlowShapePair P{with_odd(1, 0.2), with_odd(1, 0.2), 0};
  const FlowClassParams C{6, 0};
  if (!is_admissible_flow(P, C)) return {false, "flow pair not admissible"};
  MeshOptions o;
  o.h = kChannel.half_height / 6;
  const SolverConfig cfg;
  const HomotopyPath path = trapezium_path(kChannel, kTrapezium, P, C, 0.5, o);
  const ZeroLiftResult r = zero_lift_search(path, cfg);
  const double phi0 = r.trace.at(0).second;
  const double tol = std::max(1e-6 * r.scale, 10 * cfg.newton_tol);
  const bool ok = std::abs(phi0) >= 100 * r.noise_floor && std::abs(r.verified_lift) <= tol && r.solves <= 25;
  return {ok, fmt("Phi(0) %.4e (>= 100 x %.2e), root t %.6f, re-solved |lift| %.2e <= %.2e, %d solves (<= 25)", phi0,
                  r.noise_floor, r.t, std::abs(r.verified_lift), tol, r.solves)};
}

CheckResult evaluator_consistency() {
  const FlowShapePair P{poiseuille(1), poiseuille(1), 0};
  std::vector<double> gaps;
  double last_lv = 0;
  std::string detail = "gaps";
  for (double h : {1.0 / 4, 1.0 / 8, 1.0 / 16}) {
    MeshOptions o;
    o.h = h;
    o.body_h = h / 2;
    const FlowField F = solve_steady_ns(generate_mesh(kChannel, trapezium(kTrapezium), o), {0.5, P}, SolverConfig{});
    last_lv = lift_volume(F);
    gaps.push_back(std::abs(lift_boundary(F) - last_lv));
    detail += fmt(" %.3e", gaps.back());
  }
  const bool mono = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  const double rel = gaps.back() / std::abs(last_lv);
  return {mono && rel <= 0.05, detail + fmt("; monotone %s, final %.2f%% of |lift| (<= 5%%)", mono ? "yes" : "no", 100 * rel)};
}

CheckResult continuity() {
  MeshOptions o;
  o.h = 1.0 / 6;
  const ProbeConfig pc{kChannel, trapezium(kTrapezium), FlowShapePair{poiseuille(1), poiseuille(1), 0}, 0.5, o};
  const SolverConfig cfg;
  const ProbeTable tf = continuity_probe(ProbeKind::Flow, pc, {0.1, 0.05, 0.025}, cfg);
  const ProbeTable tb = continuity_probe(ProbeKind::Body, pc, {0.02, 0.01, 0.005}, cfg);
  bool ratios = true;
  std::string detail = "flow";
  for (std::size_t i = 0; i < tf.rows.size(); ++i) {
    detail += fmt(" %.2e", tf.rows[i].difference);
    if (i > 0) {
      const double q = tf.rows[i].difference / tf.rows[i - 1].difference;
      ratios = ratios && q >= 0.3 && q <= 0.7;
    }
  }
  detail += "; body";
  for (const auto& r : tb.rows) detail += fmt(" %.2e", r.difference);
  return {tf.monotone && tb.monotone && ratios,
          detail + fmt("; monotone flow %s body %s, flow ratios in [0.3, 0.7] %s", tf.monotone ? "yes" : "no",
                       tb.monotone ? "yes" : "no", ratios ? "yes" : "no")};
}

CheckResult gamma_monotone() {
  // At H = 1 the smallest pair norm exceeds 3, so the r = 3 class is empty;
  // a taller channel makes both classes feasible.
  GammaOptions opt;
  opt.R = {5, 2};
  opt.mesh.h = 0.5;
  opt.budget = 4;
  opt.restarts = 1;
  opt.seed = 3;
  const double lambda_max = 20;
  const Body B = trapezium(kTrapezium);
  const SolverConfig cfg;
  const GammaEstimate g3 = gamma_estimate(B, {3, 0}, lambda_max, cfg, opt);
  const GammaEstimate g6 = gamma_estimate(B, {6, 0}, lambda_max, cfg, opt);
  return {g3.value <= g6.value, fmt("gamma(r=3) %.6g <= gamma(r=6) %.6g", g3.value, g6.value)};
}

CheckResult energy_shape() {
  MeshOptions o;
  o.h = 1.0 / 6;
  const auto V = std::make_shared<const TaylorHoodSpace>(
      std::make_shared<const Mesh>(generate_mesh(kChannel, trapezium(kTrapezium), o)));
  const FlowShapePair P{poiseuille(1), poiseuille(1), 0};
  std::vector<double> q;
  std::string detail = "E/lambda";
  for (double lambda : {0.1, 0.2, 0.4}) {
    q.push_back(dirichlet_energy(solve_steady_ns(V, {lambda, P}, SolverConfig{})) / lambda);
    detail += fmt(" %.6g", q.back());
  }
  const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
  const double var = (*hi - *lo) / *lo;
  return {var <= 0.25, detail + fmt("; variation %.2e (<= 0.25)", var)};
}

CheckResult optimizer_oracle() {
  BodyClassd bc;
  bc.D = {2, 0.5};
  bc.alpha = 0.16;
  const FlowClassParams C{6, 0};
  const double lambda_max = 5;
  const SolverConfig cfg;
  ShapeOptOptions opt;
  opt.gamma.mesh.h = 0.18;
  opt.gamma.budget = 2;
  opt.gamma.restarts = 1;
  opt.gamma.coarse_points = 7;
  opt.gamma.refine_points = 4;
  opt.gamma.refine_passes = 1;
  opt.candidates = {centered_rectangle(0.8, 0.05), centered_rectangle(0.2, 0.2)};
  const ShapeOptResult res = optimize_body(bc, C, lambda_max, cfg, opt);

  // Exhaustive evaluation, independent of the optimizer's bookkeeping.
  double best = INFINITY;
  std::size_t winner = 0;
  std::string detail = "gamma";
  for (std::size_t i = 0; i < opt.candidates.size(); ++i) {
    const Body b = project_to_class(opt.candidates[i].vertices(), bc, opt.max_projection_iters);
    const double g = gamma_estimate(b, C, lambda_max, cfg, opt.gamma).value;
    detail += fmt(" %.6g", g);
    if (g < best) best = g, winner = i;
  }
  const Body expect = project_to_class(opt.candidates[winner].vertices(), bc, opt.max_projection_iters);
  const double d = hausdorff_distance(res.best, expect);
  const bool ok = d <= 1e-12 && res.gamma == best;
  return {ok, detail + fmt("; exhaustive winner %zu, optimizer gamma %.6g, d_H to winner %.2e", winner, res.gamma, d)};
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = {
      {1, "exact-solution", true, 30, exact_solution},
      {2, "zero-lift-baseline", true, 120, zero_lift_baseline},
      {3, "reflection-antisymmetry", true, 0, reflection_antisymmetry},
      {4, "homotopy-geometry", true, 0, homotopy_geometry},
      {5, "flow-homotopy", true, 0, flow_homotopy_contract},
      {6, "bolzano-zero-lift", false, 1800, bolzano},
      {7, "evaluator-consistency", false, 0, evaluator_consistency},
      {8, "continuity-probes", false, 0, continuity},
      {9, "gamma-monotone-in-r", false, 0, gamma_monotone},
      {10, "energy-bound-shape", true, 0, energy_shape},
      {11, "optimizer-oracle", false, 0, optimizer_oracle},
  };
  return all;
}

SuiteOutcome run_acceptance(std::ostream& out, bool quick_only, const std::vector<int>& ids) {
  SuiteOutcome s;
  for (const auto& c : acceptance_criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    if (ids.empty() && quick_only && !c.quick) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      r.passed = false;
      r.detail += fmt("; over time limit %.0fs", c.time_limit);
    }
    (r.passed ? s.passed : s.failed)++;
    out << (r.passed ? "PASS " : "FAIL ") << fmt("%2d %-24s %7.1fs  ", c.id, c.name.c_str(), secs) << r.detail << std::endl;
  }
  return s;
}

}  // namespace liftlab
