#include "liftlab/ns_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace liftlab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

void check_pair(const Mesh& M, const FlowShapePair& pair) {
  const double H = M.R.half_height;
  for (const FlowProfile* v : {&pair.v_in, &pair.v_out}) {
    if (std::abs(v->H() - H) > 1e-12 * H) throw InvalidArgument("flow profile and mesh disagree on H");
    const double scale = std::max(1.0, v->nodes().cwiseAbs().maxCoeff());
    if (std::abs((*v)(-H)) > 1e-9 * scale || std::abs((*v)(H) - pair.U) > 1e-9 * scale)
      throw InvalidArgument("flow profile violates the wall values V(-H) = 0, V(H) = U");
  }
  if (pair.U != 0 && pair.U != 1) throw InvalidArgument("U must be 0 or 1");
}

class NewtonSolver {
 public:
  NewtonSolver(const TaylorHoodSpace& V, const SolverConfig& cfg, SolverStats& stats)
      : V_(V), cfg_(cfg), stats_(stats), map_(V.size(), -1) {
    for (int k = 0; k < V.num_p2(); ++k) {
      if (V.node_tag()[k] >= 0) continue;
      map_[2 * k] = nf_++;
      map_[2 * k + 1] = nf_++;
    }
    // Pressure at vertex 0 is pinned; its continuity row is implied by the
    // others once the boundary flux balances.
    for (int v = 1; v < V.num_vertices(); ++v) map_[V.pressure_index(v)] = nf_++;
  }

  bool run(VecX& x, double lambda, int step, double* final_residual) {
    stats_.residual_history.clear();
    VecX x_prev = x;
    double res_prev = std::numeric_limits<double>::infinity();
    double res_first = -1;
    int picard_left = 0;
    bool last_picard = true;
    for (int it = 0;; ++it) {
      const bool picard = picard_left > 0;
      AssemblyOptions opt;
      opt.form = cfg_.convection;
      opt.lin = picard ? Linearization::Picard : Linearization::Newton;
      opt.index_map = &map_;
      trip_.clear();
      assemble(V_, x, R_, &trip_, opt);
      const double res = free_norm(R_);

      if (!picard && !last_picard && res > res_prev && cfg_.picard_fallback_iters > 0 && it < cfg_.max_newton_iters) {
        x = x_prev;
        picard_left = cfg_.picard_fallback_iters;
        last_picard = true;
        continue;
      }
      stats_.residual_history.push_back(res);
      stats_.log.push_back({step, lambda, it, res, picard});
      *final_residual = res;
      if (!std::isfinite(res)) return false;
      if (res <= cfg_.newton_tol) return true;
      if (res_first < 0) res_first = res;
      if (it >= cfg_.max_newton_iters || res > 1e8 * std::max(res_first, cfg_.newton_tol)) return false;

      SpMat A(nf_, nf_);
      A.setFromTriplets(trip_.begin(), trip_.end());
      A.makeCompressed();
      if (!analyzed_) {
        lu_.setPivotThreshold(cfg_.pivot_tol);
        lu_.analyzePattern(A);
        analyzed_ = true;
      }
      lu_.factorize(A);
      if (lu_.info() != Eigen::Success) throw SingularSystem("sparse LU failed: " + lu_.lastErrorMessage());
      VecX rhs(nf_);
      for (int g = 0; g < static_cast<int>(map_.size()); ++g)
        if (map_[g] >= 0) rhs(map_[g]) = -R_(g);
      const VecX dx = lu_.solve(rhs);
      if (!dx.allFinite()) return false;
      x_prev = x;
      res_prev = res;
      for (int g = 0; g < static_cast<int>(map_.size()); ++g)
        if (map_[g] >= 0) x(g) += dx(map_[g]);
      if (picard) {
        --picard_left;
        ++stats_.picard_iterations;
      } else {
        ++stats_.newton_iterations;
      }
      last_picard = picard;
    }
  }

 private:
  double free_norm(const VecX& R) const {
    double s = 0;
    for (int g = 0; g < static_cast<int>(map_.size()); ++g)
      if (map_[g] >= 0) s += R(g) * R(g);
    return std::sqrt(s);
  }

  const TaylorHoodSpace& V_;
  const SolverConfig& cfg_;
  SolverStats& stats_;
  std::vector<int> map_;
  int nf_ = 0;
  std::vector<Eigen::Triplet<double>> trip_;
  VecX R_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

void set_boundary(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& g, VecX& x) {
  for (int k = 0; k < V.num_p2(); ++k) {
    if (V.node_tag()[k] < 0) continue;
    x(2 * k) = g(0, k);
    x(2 * k + 1) = g(1, k);
  }
}

double mean_over(const Mesh& M, const VecX& p) {
  double area = 0, sum = 0;
  for (int t = 0; t < M.num_triangles(); ++t) {
    const double a = signed_area(M, t);
    area += a;
    sum += a * (p(M.triangles(0, t)) + p(M.triangles(1, t)) + p(M.triangles(2, t))) / 3;
  }
  return sum / area;
}

}  // namespace

void validate(const SolverConfig& cfg) {
  std::vector<std::string> bad;
  if (!(cfg.newton_tol > 0)) bad.push_back("newton_tol must be positive");
  if (cfg.max_newton_iters < 1) bad.push_back("max_newton_iters must be at least 1");
  if (cfg.continuation_steps < 1) bad.push_back("continuation_steps must be at least 1");
  if (!(cfg.pivot_tol >= 0 && cfg.pivot_tol <= 1)) bad.push_back("pivot_tol must lie in [0, 1]");
  if (cfg.max_step_halvings < 0) bad.push_back("max_step_halvings must be nonnegative");
  if (cfg.picard_fallback_iters < 0) bad.push_back("picard_fallback_iters must be nonnegative");
  if (bad.empty()) return;
  std::string msg = "invalid solver config:";
  for (const auto& b : bad) msg += " " + b + ";";
  throw InvalidArgument(msg);
}

Eigen::Matrix2Xd dirichlet_values(const TaylorHoodSpace& V, const FlowShapePair& pair, double lambda) {
  const Mesh& M = V.mesh();
  check_pair(M, pair);
  const double H = M.R.half_height;
  Eigen::Matrix2Xd g = Eigen::Matrix2Xd::Zero(2, V.num_p2());
  for (int k = 0; k < V.num_p2(); ++k) {
    const int tag = V.node_tag()[k];
    if (tag < 0) continue;
    const double y = V.points()(1, k);
    switch (static_cast<BoundaryTag>(tag)) {
      case BoundaryTag::GammaTop: g(0, k) = lambda * pair.U; break;
      case BoundaryTag::GammaLeft: g(0, k) = lambda * pair.v_in(y); break;
      case BoundaryTag::GammaRight: g(0, k) = lambda * pair.v_out(y); break;
      default: break;
    }
  }
  // Simpson's rule integrates the quadratic interpolant exactly.
  double in = 0, out = 0, bump = 0;
  const auto& bn = V.boundary_nodes();
  for (int e = 0; e < M.num_boundary_edges(); ++e) {
    const BoundaryTag tag = M.boundary_tags[e];
    if (tag != BoundaryTag::GammaLeft && tag != BoundaryTag::GammaRight) continue;
    const int a = bn(0, e), b = bn(1, e), m = bn(2, e);
    const double len = (V.points().col(b) - V.points().col(a)).norm();
    const double f = len / 6 * (g(0, a) + 4 * g(0, m) + g(0, b));
    if (tag == BoundaryTag::GammaLeft) {
      in += f;
    } else {
      out += f;
      auto beta = [&](int n) { return H * H - V.points()(1, n) * V.points()(1, n); };
      bump += len / 6 * (beta(a) + 4 * beta(m) + beta(b));
    }
  }
  if (bump > 0) {
    const double c = (in - out) / bump;
    for (int k = 0; k < V.num_p2(); ++k)
      if (V.node_tag()[k] == static_cast<int>(BoundaryTag::GammaRight))
        g(0, k) += c * (H * H - V.points()(1, k) * V.points()(1, k));
  }
  return g;
}

FlowField solve_steady_ns(const Mesh& M, const BoundaryData& bd, const SolverConfig& cfg) {
  return solve_steady_ns(std::make_shared<const TaylorHoodSpace>(std::make_shared<const Mesh>(M)), bd, cfg);
}

FlowField solve_steady_ns(std::shared_ptr<const TaylorHoodSpace> V, const BoundaryData& bd, const SolverConfig& cfg,
                          const FlowField* warm) {
  validate(cfg);
  if (!V) throw InvalidArgument("solve_steady_ns: null space");
  if (!(bd.lambda >= 0) || !std::isfinite(bd.lambda)) throw InvalidArgument("solve_steady_ns: lambda must be >= 0");
  const Eigen::Matrix2Xd g1 = dirichlet_values(*V, bd.pair, 1.0);

  FlowField F;
  F.space = V;
  F.convection = cfg.convection;
  NewtonSolver newton(*V, cfg, F.stats);

  VecX x = VecX::Zero(V->size());
  double current = 0;
  if (warm && warm->space && warm->space->size() == V->size() &&
      (warm->space == V || fingerprint(warm->mesh()) == fingerprint(V->mesh()))) {
    x = pack(*V, warm->velocity, warm->pressure);
    current = warm->lambda;
  }

  double step = (bd.lambda - current) / cfg.continuation_steps;
  int index = 0;
  bool first = true;
  while (first || current != bd.lambda) {
    first = false;
    const double remaining = bd.lambda - current;
    const double next = std::abs(remaining) <= std::abs(step) * (1 + 1e-12) ? bd.lambda : current + step;
    VecX trial = x;
    set_boundary(*V, next * g1, trial);
    double res = 0;
    if (newton.run(trial, next, index++, &res)) {
      x = std::move(trial);
      current = next;
      F.residual = res;
      ++F.stats.continuation_steps;
      continue;
    }
    if (step == 0 || F.stats.step_halvings >= cfg.max_step_halvings) {
      std::ostringstream msg;
      msg << "Newton failed at lambda = " << next << " (residual " << res << ") after "
          << F.stats.step_halvings << " step halvings";
      throw SolverDivergence(msg.str());
    }
    step /= 2;
    ++F.stats.step_halvings;
  }

  F.velocity = unpack_velocity(*V, x);
  F.pressure = unpack_pressure(*V, x);
  F.pressure.array() -= mean_over(V->mesh(), F.pressure);
  F.lambda = bd.lambda;
  return F;
}

double dirichlet_energy(const FlowField& F) {
  const Mesh& M = F.mesh();
  const auto& dofs = F.space->dofs();
  const auto& rule = triangle_rule();
  Eigen::Matrix<double, 6, 1> phi;
  Eigen::Matrix<double, 2, 6> dphi, U;
  double sum = 0;
  for (int t = 0; t < M.num_triangles(); ++t) {
    const ElementGeometry E = element_geometry(M, t);
    for (int k = 0; k < 6; ++k) U.col(k) = F.velocity.col(dofs(k, t));
    for (int q = 0; q < 7; ++q) {
      p2_basis(rule.bary[q], E.grad_bary, phi, dphi);
      sum += rule.weight[q] * E.area * (U * dphi.transpose()).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double divergence_residual(const FlowField& F) {
  VecX R;
  assemble(*F.space, pack(*F.space, F.velocity, F.pressure), R);
  return R.tail(F.space->num_vertices()).cwiseAbs().maxCoeff();
}

double pressure_mean(const FlowField& F) { return mean_over(F.mesh(), F.pressure); }

double embedding_proxy(const Rectd& R) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find({R.half_width, R.half_height});
    if (it != cache.end()) return it->second;
  }
  const Mesh M = generate_mesh(R, std::nullopt, R.half_height / 8);
  const int n = M.num_nodes();
  std::vector<char> wall(n, 0);
  for (int e = 0; e < M.num_boundary_edges(); ++e) wall[M.boundary_edges(0, e)] = wall[M.boundary_edges(1, e)] = 1;
  std::vector<int> id(n, -1);
  int nf = 0;
  for (int i = 0; i < n; ++i)
    if (!wall[i]) id[i] = nf++;

  std::vector<Eigen::Triplet<double>> trip;
  std::vector<Eigen::Matrix<double, 2, 3>> grads(M.num_triangles());
  for (int t = 0; t < M.num_triangles(); ++t) {
    const Vec2 a = M.node(M.triangles(0, t)), b = M.node(M.triangles(1, t)), c = M.node(M.triangles(2, t));
    const double twice = cross<double>(b - a, c - a);
    auto& gl = grads[t];
    gl.col(0) = Vec2(b.y() - c.y(), c.x() - b.x()) / twice;
    gl.col(1) = Vec2(c.y() - a.y(), a.x() - c.x()) / twice;
    gl.col(2) = Vec2(a.y() - b.y(), b.x() - a.x()) / twice;
    const Eigen::Matrix3d K = twice / 2 * gl.transpose() * gl;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int gi = id[M.triangles(i, t)], gj = id[M.triangles(j, t)];
        if (gi >= 0 && gj >= 0) trip.emplace_back(gi, gj, K(i, j));
      }
  }
  SpMat K(nf, nf);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SingularSystem("embedding_proxy: factorization failed");

  const auto& rule = triangle_rule();
  auto value = [&](const VecX& w, int t, const Eigen::Vector3d& l) {
    double s = 0;
    for (int i = 0; i < 3; ++i) {
      const int g = id[M.triangles(i, t)];
      if (g >= 0) s += w(g) * l(i);
    }
    return s;
  };
  auto l4 = [&](const VecX& w) {
    double s = 0;
    for (int t = 0; t < M.num_triangles(); ++t)
      for (int q = 0; q < 7; ++q) s += rule.weight[q] * signed_area(M, t) * std::pow(value(w, t, rule.bary[q]), 4);
    return std::pow(s, 0.25);
  };

  VecX w(nf);
  const double L = R.half_width, H = R.half_height;
  for (int i = 0; i < n; ++i)
    if (id[i] >= 0) w(id[i]) = (L * L - M.nodes(0, i) * M.nodes(0, i)) * (H * H - M.nodes(1, i) * M.nodes(1, i));
  w /= l4(w);
  double best = w.dot(K * w);
  for (int it = 0; it < 200; ++it) {
    VecX b = VecX::Zero(nf);
    for (int t = 0; t < M.num_triangles(); ++t)
      for (int q = 0; q < 7; ++q) {
        const double u = value(w, t, rule.bary[q]);
        const double f = rule.weight[q] * signed_area(M, t) * u * u * u;
        for (int i = 0; i < 3; ++i) {
          const int g = id[M.triangles(i, t)];
          if (g >= 0) b(g) += f * rule.bary[q](i);
        }
      }
    w = ldlt.solve(b);
    w /= l4(w);
    const double q = w.dot(K * w);
    const bool done = std::abs(best - q) <= 1e-10 * best;
    best = std::min(best, q);
    if (done) break;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[{R.half_width, R.half_height}] = best;
  return best;
}

std::string to_string(LambdaLimit l) {
  switch (l) {
    case LambdaLimit::Cap: return "cap-limited";
    case LambdaLimit::Newton: return "newton-limited";
    case LambdaLimit::Contraction: return "contraction-limited";
  }
  return "?";
}

LambdaEstimate estimate_lambda_max(const Mesh& M, const FlowShapePair& pair, const SolverConfig& cfg,
                                   const LambdaSchedule& schedule) {
  if (!(schedule.start > 0 && schedule.cap >= schedule.start && schedule.bisections >= 0))
    throw InvalidArgument("estimate_lambda_max: need 0 < start <= cap and bisections >= 0");
  LambdaEstimate est;
  est.s0 = embedding_proxy(M.R);
  const auto V = std::make_shared<const TaylorHoodSpace>(std::make_shared<const Mesh>(M));

  std::optional<FlowField> last;
  LambdaLimit why = LambdaLimit::Cap;
  auto probe = [&](double lambda) {
    try {
      FlowField F = solve_steady_ns(V, BoundaryData{lambda, pair}, cfg, last ? &*last : nullptr);
      const bool ok = dirichlet_energy(F) / est.s0 < 1;
      if (!ok) why = LambdaLimit::Contraction;
      est.probes.emplace_back(lambda, ok);
      if (ok) last = std::move(F);
      return ok;
    } catch (const SolverDivergence&) {
      why = LambdaLimit::Newton;
      est.probes.emplace_back(lambda, false);
      return false;
    }
  };

  double good = 0, bad = -1;
  for (double lambda = schedule.start;; lambda *= 2) {
    lambda = std::min(lambda, schedule.cap);
    if (!probe(lambda)) {
      bad = lambda;
      break;
    }
    good = lambda;
    if (lambda >= schedule.cap) break;
  }
  if (bad < 0) {
    est.lambda = good;
    est.limit = LambdaLimit::Cap;
    return est;
  }
  LambdaLimit bracket_reason = why;
  for (int i = 0; i < schedule.bisections; ++i) {
    const double mid = (good + bad) / 2;
    if (probe(mid)) {
      good = mid;
    } else {
      bad = mid;
      bracket_reason = why;
    }
  }
  est.lambda = good;
  est.limit = bracket_reason;
  return est;
}

}  // namespace liftlab
