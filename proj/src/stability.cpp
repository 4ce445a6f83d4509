#include "liftlab/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace liftlab {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool is_even_pair(const FlowShapePair& p) {
  return find_odd_zeros(even_odd_split(p.v_in.sampled()).second).identically_zero &&
         find_odd_zeros(even_odd_split(p.v_out.sampled()).second).identically_zero;
}

struct PathSample {
  double lift = 0;
  double drag = 0;
};

PathSample evaluate_path(const HomotopyPath& path, double t, const SolverConfig& cfg) {
  const Mesh M = path.mesh(t);
  const FlowField F = solve_steady_ns(M, {path.lambda, path.flow(t)}, cfg);
  return {lift_volume(F), drag_volume(F)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Homotopy paths and the zero-lift search

Mesh HomotopyPath::mesh(double t) const {
  if (!reference || !reference->body) throw InvalidArgument("HomotopyPath: reference mesh with a body is required");
  const Body b = body(t);
  if (same_point_set(b, *reference->body, 0.0)) return *reference;
  if (!anchors_at) return morph_mesh(*reference, b);
  // Incremental morph in eps steps of at most kMorphStep; each step re-solves
  // the extension on the deformed mesh. Step points depend continuously on eps.
  constexpr double kMorphStep = 0.05;
  const double target = eps(t);
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(target - reference_eps) / kMorphStep)));
  Mesh M = *reference;
  double prev = reference_eps;
  for (int k = 1; k <= steps; ++k) {
    const double e = reference_eps + (target - reference_eps) * k / steps;
    const Body next = body_at(e);
    std::function<Vec2(const Vec2&)> map;
    try {
      map = anchored_boundary_map(*M.body, next, anchors_at(prev), anchors_at(e));
    } catch (const InvalidArgument&) {
      return generate_mesh(reference->R, b, mesh_options);
    }
    M = morph_mesh(M, next, map);
    prev = e;
  }
  return M;
}

Report HomotopyPath::check() const {
  Report rep;
  if (!eps || !delta || !body_at || !flow_at) {
    rep.violations.push_back("path: missing map");
    return rep;
  }
  if (!reference) rep.violations.push_back("path: missing reference mesh");
  if (eps(0) != 0 || delta(0) != 0) rep.violations.push_back("path: eps(0) and delta(0) must be 0");
  auto unit = [](double v) { return v == 0 || v == 1; };
  if (!unit(eps(1)) || !unit(delta(1)) || eps(1) + delta(1) == 0)
    rep.violations.push_back("path: eps(1), delta(1) must be 0 or 1 and not both 0");
  for (int i = 0; i <= 64; ++i) {
    const double t = i / 64.0, e = eps(t), d = delta(t);
    if (!(e >= 0 && e <= 1 && d >= 0 && d <= 1)) {
      rep.violations.push_back("path: eps or delta leaves [0,1] at t = " + std::to_string(t));
      break;
    }
  }
  if (!(lambda > 0)) rep.violations.push_back("path: lambda must be positive");
  return rep;
}

HomotopyPath trapezium_path(const Rectd& R, const Trapezium& body, const FlowShapePair& pair, const FlowClassParams& C,
                            double lambda, const MeshOptions& mesh) {
  validate(body, R);
  HomotopyPath p;
  p.body_at = [body](double e) { return body_family(e, body); };
  p.flow_at = [pair, C](double d) { return flow_homotopy(pair, d, C); };
  p.reference = std::make_shared<const Mesh>(generate_mesh(R, body_family(0.5, body), mesh));
  // (l,h) is left out: its arc to the upper corner vanishes at eps = 1.
  p.anchors_at = [body](double e) {
    const auto s = body_family_slots(e, body);
    return std::vector<Vec2>{s[0], s[1], s[2], s[3], s[5]};
  };
  p.mesh_options = mesh;
  p.lambda = lambda;
  return p;
}

HomotopyPath fixed_body_path(const Rectd& R, const Body& body, const FlowShapePair& pair, const FlowClassParams& C,
                             double lambda, const MeshOptions& mesh) {
  HomotopyPath p;
  p.body_at = [body](double) { return body; };
  if (is_even_pair(pair))
    p.flow_at = [pair](double) { return pair; };
  else
    p.flow_at = [pair, C](double d) { return flow_homotopy(pair, d, C); };
  p.reference = std::make_shared<const Mesh>(generate_mesh(R, body, mesh));
  p.mesh_options = mesh;
  p.lambda = lambda;
  return p;
}

ZeroLiftResult zero_lift_search(const HomotopyPath& path, const SolverConfig& cfg, const ZeroLiftOptions& opt) {
  validate(cfg);
  if (const Report r = path.check(); !r.ok()) throw InvalidArgument(r.violations.front());
  if (path.flow(0).U != 0) throw InvalidArgument("zero_lift_search: requires U = 0");
  if (opt.max_bisections < 0) throw InvalidArgument("zero_lift_search: max_bisections must be nonnegative");

  ZeroLiftResult res;
  auto phi = [&](double t) {
    const PathSample s = evaluate_path(path, t, cfg);
    ++res.solves;
    res.trace.emplace_back(t, s.lift);
    return s;
  };
  const PathSample s0 = phi(0);
  res.scale = std::abs(s0.drag);
  res.lift_tol = opt.lift_tol > 0 ? opt.lift_tol : std::max(1e-6 * res.scale, 10 * cfg.newton_tol);
  res.noise_floor = opt.noise_rel * res.scale;
  double a = 0, b = 1, fa = s0.lift, fb = phi(1).lift;
  if (std::abs(fa) < res.noise_floor || std::abs(fb) < res.noise_floor)
    throw NoSignChange("no sign change: lift at endpoints below noise floor");
  if ((fa > 0) == (fb > 0)) throw NoSignChange("no sign change: endpoint lifts have the same sign");

  auto finish = [&](double t, double f) {
    res.t = t;
    res.lift = f;
    res.eps = path.eps(t);
    res.delta = path.delta(t);
    res.verified_lift = phi(t).lift;
    return res;
  };

  for (int i = 0; i < opt.max_bisections; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = phi(m).lift;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
    res.widths.push_back(b - a);
    if (std::abs(fm) <= res.lift_tol) return finish(m, fm);
  }
  const double t = a - fa * (b - a) / (fb - fa);
  return finish(t, phi(t).lift);
}

// ---------------------------------------------------------------------------
// Flow parameterization

FlowShapePair FlowParameterization::raw(const VecX& c) const {
  if (c.size() != dim()) throw InvalidArgument("FlowParameterization: coefficient vector has the wrong size");
  const int n_in = (m + 1) / 2;
  const FlowProfile base = U == 0 ? poiseuille(H, nodes) : couette(H, nodes);
  auto build = [&](const double* even, const double* odd, int count) {
    // No modes: keep the closed-form base rather than its sampled copy.
    if (std::all_of(even, even + count, [](double a) { return a == 0; }) &&
        std::all_of(odd, odd + count, [](double b) { return b == 0; }))
      return base;
    return renormalize_flux(FlowProfile::from_function(H, nodes, [&](double x) {
      const double s = x / H, w = 1 - s * s;
      double v = base(x);
      for (int k = 1; k <= count; ++k) {
        const double ck = 3.0 / ((2 * k + 1) * (2 * k + 3));
        v += w * (even[k - 1] * (std::pow(s, 2 * k) - ck) + odd[k - 1] * std::pow(s, 2 * k - 1));
      }
      return v;
    }));
  };
  const double* e = c.data();
  const double* o = c.data() + m;
  return {build(e, o, n_in), build(e + n_in, o + n_in, m - n_in), U};
}

VecX FlowParameterization::to_canonical(const VecX& z) const {
  if (order.empty()) return z;
  VecX c(z.size());
  for (int i = 0; i < z.size(); ++i) c(order[i]) = z(i);
  return c;
}

VecX FlowParameterization::from_canonical(const VecX& c) const {
  if (order.empty()) return c;
  VecX z(c.size());
  for (int i = 0; i < c.size(); ++i) z(i) = c(order[i]);
  return z;
}

FlowShapePair FlowParameterization::pair(const VecX& z, const FlowClassParams& C) const {
  if (!order.empty()) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < dim(); ++i)
      if (static_cast<int>(sorted.size()) != dim() || sorted[i] != i)
        throw InvalidArgument("FlowParameterization: order is not a permutation");
  }
  const VecX c = to_canonical(z);
  VecX even = c, odd = c;
  even.tail(m).setZero();
  odd.head(m).setZero();
  auto even_norm = [&](double tau) {
    const FlowShapePair p = raw(tau * even);
    return w1inf_norm(p.v_in) + w1inf_norm(p.v_out);
  };
  const double budget = C.r * (1 - 1e-9);
  if (even_norm(0) > budget) throw InvalidArgument("flow parameterization infeasible: r admits no base pair");
  double tau = 1;
  if (even_norm(1) > budget) {
    double lo = 0, hi = 1;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (even_norm(mid) <= budget ? lo : hi) = mid;
    }
    tau = lo;
  }
  const FlowShapePair e = raw(tau * even), full = raw(tau * even + odd);
  if (odd.isZero()) return e;
  const FlowProfile o_in = full.v_in - e.v_in, o_out = full.v_out - e.v_out;
  const double s = odd_shrink_factor(e.v_in, o_in, e.v_out, o_out, budget);
  return {renormalize_flux(e.v_in + s * o_in), renormalize_flux(e.v_out + s * o_out), U};
}

std::string FlowParameterization::fingerprint() const {
  std::string s = "poly-H" + std::to_string(H) + "-U" + std::to_string(U) + "-m" + std::to_string(m) + "-n" +
                  std::to_string(nodes);
  if (!order.empty()) {
    s += "-order";
    for (int i : order) s += "." + std::to_string(i);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Gamma

LiftCurve adaptive_lift_sup(const Mesh& M, const FlowShapePair& pair, double lambda_max, const SolverConfig& cfg,
                            const GammaOptions& opt) {
  if (!(lambda_max > 0)) throw InvalidArgument("adaptive_lift_sup: lambda_max must be positive");
  if (opt.coarse_points < 2) throw InvalidArgument("adaptive_lift_sup: need at least 2 coarse points");
  std::vector<double> grid;
  for (int i = 0; i < opt.coarse_points; ++i) grid.push_back(lambda_max * i / (opt.coarse_points - 1));
  LiftCurve C = lift_curve(M, pair, grid, cfg);
  double spacing = lambda_max / (opt.coarse_points - 1);
  for (int pass = 0; pass < opt.refine_passes && !C.truncated; ++pass) {
    const double centre = C.lambdas[C.argmax()];
    std::vector<double> pts;
    for (int j = 1; j <= opt.refine_points; ++j) {
      const double l = centre - spacing + 2 * spacing * j / (opt.refine_points + 1);
      if (l > 0 && l <= lambda_max && std::find(C.lambdas.begin(), C.lambdas.end(), l) == C.lambdas.end())
        pts.push_back(l);
    }
    if (pts.empty()) break;
    const LiftCurve R = lift_curve(M, pair, pts, cfg);
    for (std::size_t i = 1; i < R.lambdas.size(); ++i) {
      const auto at = std::lower_bound(C.lambdas.begin(), C.lambdas.end(), R.lambdas[i]) - C.lambdas.begin();
      C.lambdas.insert(C.lambdas.begin() + at, R.lambdas[i]);
      C.lifts.insert(C.lifts.begin() + at, R.lifts[i]);
      C.residuals.insert(C.residuals.begin() + at, R.residuals[i]);
    }
    if (R.truncated) {
      C.truncated = true;
      C.failure = R.failure;
    }
    spacing = 2 * spacing / (opt.refine_points + 1);
  }
  return C;
}

namespace {

// Nelder-Mead minimization of f from x0 while `alive` holds.
void nelder_mead(const std::function<double(const VecX&)>& f, const VecX& x0, double step,
                 const std::vector<int>& vertex_order, const std::function<bool()>& alive) {
  const int n = static_cast<int>(x0.size());
  std::vector<VecX> X;
  std::vector<double> F;
  X.push_back(x0);
  for (int i : vertex_order) {
    VecX x = x0;
    x(i) += step;
    X.push_back(x);
  }
  for (const VecX& x : X) {
    if (!alive()) return;
    F.push_back(f(x));
  }
  std::vector<int> idx(n + 1);
  while (alive()) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return F[a] < F[b]; });
    const int best = idx.front(), worst = idx.back(), second = idx[n - 1];
    double size = 0;
    for (const VecX& x : X) size = std::max(size, (x - X[best]).cwiseAbs().maxCoeff());
    if (size < 1e-6) return;
    VecX centroid = VecX::Zero(n);
    for (int k = 0; k < n; ++k) centroid += X[idx[k]];
    centroid /= n;
    const VecX xr = centroid + (centroid - X[worst]);
    const double fr = f(xr);
    if (fr < F[best]) {
      if (!alive()) return;
      const VecX xe = centroid + 2 * (centroid - X[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        X[worst] = xe;
        F[worst] = fe;
      } else {
        X[worst] = xr;
        F[worst] = fr;
      }
    } else if (fr < F[second]) {
      X[worst] = xr;
      F[worst] = fr;
    } else {
      if (!alive()) return;
      const VecX xc = fr < F[worst] ? VecX(centroid + 0.5 * (xr - centroid)) : VecX(centroid + 0.5 * (X[worst] - centroid));
      const double fc = f(xc);
      if (fc < std::min(fr, F[worst])) {
        X[worst] = xc;
        F[worst] = fc;
      } else {
        for (int k = 1; k <= n && alive(); ++k) {
          X[idx[k]] = X[best] + 0.5 * (X[idx[k]] - X[best]);
          F[idx[k]] = f(X[idx[k]]);
        }
      }
    }
  }
}

}  // namespace

GammaEstimate gamma_estimate(const Body& B, const FlowClassParams& C, double lambda_max, const SolverConfig& cfg,
                             const GammaOptions& opt) {
  validate(cfg);
  validate(C, opt.R.half_height);
  if (!(lambda_max > 0)) throw InvalidArgument("gamma_estimate: lambda_max must be positive");
  if (opt.m < 0 || opt.budget < 0 || opt.restarts < 0) throw InvalidArgument("gamma_estimate: negative budget");
  FlowParameterization P;
  P.H = opt.R.half_height;
  P.U = C.U;
  P.m = opt.m;
  P.order = opt.basis_order;
  if (!P.order.empty() && static_cast<int>(P.order.size()) != P.dim())
    throw InvalidArgument("gamma_estimate: basis_order must permute 2m coefficients");

  const Mesh M = generate_mesh(opt.R, B, opt.mesh);
  GammaEstimate G;
  G.parameterization_id = P.fingerprint() + (opt.mirrored ? "-mirrored" : "");
  G.value = -1;

  int used = 0;
  auto evaluate = [&](const VecX& z) {
    const auto t0 = std::chrono::steady_clock::now();
    VecX c = P.to_canonical(z);
    if (opt.mirrored) c.tail(P.m) *= -1;
    FlowShapePair pair = P.pair(P.from_canonical(c), C);
    if (const Report r = is_admissible_flow(pair, C); !r.ok())
      throw Error("gamma_estimate: projected pair is not admissible: " + r.violations.front());
    const LiftCurve curve = adaptive_lift_sup(M, pair, lambda_max, cfg, opt);
    G.solves += static_cast<int>(curve.lambdas.size()) - 1;
    G.mesh_id = curve.mesh_id;
    GammaTraceEntry e;
    e.evaluation = static_cast<int>(G.trace.size());
    e.flow_id = curve.flow_id;
    e.sup = curve.sup_norm();
    e.argmax_lambda = curve.lambdas[curve.argmax()];
    e.seconds = seconds_since(t0);
    G.trace.push_back(e);
    if (curve.truncated) return 0.0;  // beyond the solvable range; never the max
    if (e.sup > G.value) {
      G.value = e.sup;
      G.argmax_pair = pair;
      G.argmax_coefficients = c;
      G.argmax_lambda = e.argmax_lambda;
    }
    return -e.sup;
  };

  evaluate(VecX::Zero(P.dim()));
  if (G.value < 0) throw SolverDivergence("gamma_estimate: base pair fails below lambda_max");
  if (P.dim() == 0 || opt.budget == 0) return G;

  auto alive = [&] { return used < opt.budget; };
  auto counted = [&](const VecX& z) {
    ++used;
    return evaluate(z);
  };
  // Simplex vertices perturb canonical coefficients in canonical order.
  std::vector<int> vertex_order(P.dim());
  std::iota(vertex_order.begin(), vertex_order.end(), 0);
  if (!P.order.empty())
    std::sort(vertex_order.begin(), vertex_order.end(), [&](int a, int b) { return P.order[a] < P.order[b]; });

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int restart = 0; restart <= opt.restarts && alive(); ++restart) {
    VecX c0 = VecX::Zero(P.dim());
    if (restart > 0)
      for (int i = 0; i < P.dim(); ++i) c0(i) = unif(rng);
    const int share = std::max(1, (opt.budget - used) / (opt.restarts - restart + 1));
    const int stop = used + share;
    nelder_mead(counted, P.from_canonical(c0), opt.step, vertex_order, [&] { return used < stop && alive(); });
  }
  return G;
}

// ---------------------------------------------------------------------------
// Shape optimization

Body project_to_class(const std::vector<Vec2>& points, const BodyClassd& bc, int max_iters) {
  std::vector<Vec2> pts = points;
  for (int it = 0; it < max_iters; ++it) {
    Body b = convex_hull(pts);
    b = scale_about(b, centroid(b), std::sqrt(bc.alpha / polygon_area(b)));
    Vec2 lo = b[0], hi = b[0];
    for (const auto& v : b.vertices()) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    Vec2 shift = Vec2::Zero();
    for (int d = 0; d < 2; ++d) {
      const double half = d == 0 ? bc.D.half_width : bc.D.half_height;
      if (hi(d) - lo(d) <= 2 * half) {
        if (hi(d) > half) shift(d) = half - hi(d);
        if (lo(d) < -half) shift(d) = -half - lo(d);
      } else {
        shift(d) = -0.5 * (lo(d) + hi(d));
      }
    }
    b = clip_to_rect(translate(b, shift), bc.D);
    if (is_admissible_body(b, bc).ok()) return b;
    pts = b.vertices();
  }
  throw Error("projection failed to reach an admissible body in " + std::to_string(max_iters) +
              " iterations; alpha may be too large for D");
}

ShapeOptResult optimize_body(const BodyClassd& bc, const FlowClassParams& C, double lambda_max, const SolverConfig& cfg,
                             const ShapeOptOptions& opt) {
  validate(bc, opt.gamma.R);
  if (opt.vertices < 3 || opt.population < 1 || opt.generations < 0 || opt.threads < 1 || !(opt.sigma > 0))
    throw InvalidArgument("optimize_body: bad options");

  auto gamma_of = [&](const Body& b) { return gamma_estimate(b, C, lambda_max, cfg, opt.gamma).value; };
  auto evaluate_all = [&](const std::vector<Body>& bodies) {
    std::vector<double> out(bodies.size());
    for (std::size_t start = 0; start < bodies.size(); start += static_cast<std::size_t>(opt.threads)) {
      std::vector<std::future<double>> jobs;
      const std::size_t end = std::min(bodies.size(), start + static_cast<std::size_t>(opt.threads));
      for (std::size_t i = start; i < end; ++i)
        jobs.push_back(std::async(opt.threads > 1 ? std::launch::async : std::launch::deferred,
                                  [&, i] { return gamma_of(bodies[i]); }));
      for (std::size_t i = start; i < end; ++i) out[i] = jobs[i - start].get();
    }
    return out;
  };

  ShapeOptResult res;
  auto record = [&](const Body& b, double g) {
    const double best = res.history.empty() ? g : std::min(res.history.back().best_so_far, g);
    if (res.history.empty() || g < res.gamma) {
      res.best = b;
      res.gamma = g;
    }
    res.history.push_back({b, g, best, is_admissible_body(b, bc)});
  };

  if (!opt.candidates.empty()) {
    std::vector<Body> bodies;
    for (const Body& c : opt.candidates) bodies.push_back(project_to_class(c.vertices(), bc, opt.max_projection_iters));
    const std::vector<double> g = evaluate_all(bodies);
    for (std::size_t i = 0; i < bodies.size(); ++i) record(bodies[i], g[i]);
    res.feasibility = is_admissible_body(res.best, bc);
    return res;
  }

  std::vector<Vec2> start;
  if (opt.initial) {
    start = opt.initial->vertices();
  } else {
    const double n = opt.vertices, rho = std::sqrt(2 * bc.alpha / (n * std::sin(2 * std::numbers::pi / n)));
    for (int k = 0; k < opt.vertices; ++k)
      start.emplace_back(rho * std::cos(2 * std::numbers::pi * k / n), rho * std::sin(2 * std::numbers::pi * k / n));
  }
  Body parent = project_to_class(start, bc, opt.max_projection_iters);
  double parent_gamma = gamma_of(parent);
  record(parent, parent_gamma);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sigma = opt.sigma;
  for (int gen = 0; gen < opt.generations; ++gen) {
    std::vector<Body> children;
    for (int k = 0; k < opt.population; ++k) {
      std::vector<Vec2> pts = parent.vertices();
      for (auto& p : pts) p += sigma * Vec2(normal(rng), normal(rng));
      try {
        children.push_back(project_to_class(pts, bc, opt.max_projection_iters));
      } catch (const Error&) {
        // infeasible child; dropped
      }
    }
    const std::vector<double> g = evaluate_all(children);
    bool improved = false;
    for (std::size_t i = 0; i < children.size(); ++i) {
      record(children[i], g[i]);
      if (g[i] < parent_gamma) {
        parent = children[i];
        parent_gamma = g[i];
        improved = true;
      }
    }
    sigma *= improved ? 1.5 : 0.8;
  }
  res.feasibility = is_admissible_body(res.best, bc);
  return res;
}

// ---------------------------------------------------------------------------
// Continuity probes

ProbeTable continuity_probe(ProbeKind kind, const ProbeConfig& base, const std::vector<double>& sizes,
                            const SolverConfig& cfg) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] >= 0)) throw InvalidArgument("continuity_probe: sizes must be nonnegative");
    if (i > 0 && !(sizes[i] < sizes[i - 1])) throw InvalidArgument("continuity_probe: sizes must decrease");
  }
  const Mesh M0 = generate_mesh(base.R, base.body, base.mesh);
  // Sampled profiles on both sides so only the perturbation differs.
  const FlowShapePair pair{base.pair.v_in.sampled(), base.pair.v_out.sampled(), base.pair.U};
  auto solve_lift = [&](const Mesh& M, const FlowShapePair& p) {
    return lift_volume(solve_steady_ns(M, {base.lambda, p}, cfg));
  };

  ProbeTable T;
  T.base_lift = solve_lift(M0, pair);
  const double H = pair.v_in.H();
  FlowProfile psi = FlowProfile::from_function(H, pair.v_in.size(), [H](double x) {
    const double s = x / H;
    return (1 - s * s) * s;
  });
  psi = (1 / w1inf_norm(psi)) * psi;

  for (double size : sizes) {
    ProbeRow row;
    row.size = size;
    try {
      if (kind == ProbeKind::Flow) {
        row.lift = solve_lift(M0, {pair.v_in + size * psi, pair.v_out, pair.U});
      } else {
        const Vec2 d = size * base.direction.normalized();
        const Mesh M = size == 0 ? M0 : morph_mesh(M0, translate(base.body, d), [d](const Vec2& p) { return Vec2(p + d); });
        row.lift = solve_lift(M, pair);
      }
      row.difference = std::abs(row.lift - T.base_lift);
    } catch (const Error& e) {
      row.error = e.what();
    }
    T.rows.push_back(row);
  }
  T.monotone = !T.rows.empty();
  for (std::size_t i = 0; i < T.rows.size(); ++i) {
    if (!T.rows[i].error.empty()) T.monotone = false;
    if (i > 0 && !(T.rows[i].difference < T.rows[i - 1].difference)) T.monotone = false;
  }
  T.passed = T.monotone && T.rows.back().difference <= base.tolerance;
  return T;
}

}  // namespace liftlab
