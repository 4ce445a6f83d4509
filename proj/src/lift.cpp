#include "liftlab/lift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <future>
#include <optional>
#include <unordered_map>

namespace liftlab {

namespace {

constexpr int kBody = static_cast<int>(BoundaryTag::BodyBoundary);

void require_body(const TaylorHoodSpace& V, const char* who) {
  const Mesh& M = V.mesh();
  for (auto t : M.boundary_tags)
    if (t == BoundaryTag::BodyBoundary) return;
  throw InvalidArgument(std::string(who) + ": mesh has no body boundary");
}

// Sum of phi-weighted velocity rows of the residual.
double residual_pairing(const TaylorHoodSpace& V, const VecX& R, const Eigen::Matrix2Xd& phi) {
  double s = 0;
  for (int k = 0; k < V.num_p2(); ++k) s += R(2 * k) * phi(0, k) + R(2 * k + 1) * phi(1, k);
  return s;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

double lift_boundary(const FlowField& F) {
  const TaylorHoodSpace& V = *F.space;
  require_body(V, "lift_boundary");
  const Mesh& M = V.mesh();

  std::unordered_map<std::uint64_t, int> owner;  // directed edge -> triangle
  auto key = [](int a, int b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b); };
  for (int t = 0; t < M.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) owner[key(M.triangles(i, t), M.triangles((i + 1) % 3, t))] = t;

  const double g = 0.5 / std::sqrt(3.0);
  Eigen::Matrix<double, 6, 1> phi;
  Eigen::Matrix<double, 2, 6> dphi;
  double lift = 0;
  for (int e = 0; e < M.num_boundary_edges(); ++e) {
    if (M.boundary_tags[e] != BoundaryTag::BodyBoundary) continue;
    const int a = M.boundary_edges(0, e), b = M.boundary_edges(1, e);
    auto it = owner.find(key(a, b));
    if (it == owner.end()) throw Error("lift_boundary: boundary edge is not oriented with its triangle");
    const int t = it->second;
    int ia = 0, ib = 0;
    for (int i = 0; i < 3; ++i) {
      if (M.triangles(i, t) == a) ia = i;
      if (M.triangles(i, t) == b) ib = i;
    }
    const ElementGeometry E = element_geometry(M, t);
    Eigen::Matrix<double, 2, 6> U;
    for (int k = 0; k < 6; ++k) U.col(k) = F.velocity.col(V.dofs()(k, t));
    const Vec2 d = M.node(b) - M.node(a);
    const Vec2 n_len(d.y(), -d.x());  // outward of the triangle, scaled by the edge length
    for (double s : {0.5 - g, 0.5 + g}) {
      Eigen::Vector3d l = Eigen::Vector3d::Zero();
      l(ia) = 1 - s;
      l(ib) = s;
      p2_basis(l, E.grad_bary, phi, dphi);
      const Eigen::Matrix2d G = U * dphi.transpose();
      const double p = (1 - s) * F.pressure(a) + s * F.pressure(b);
      const Eigen::Matrix2d T = G + G.transpose() - p * Eigen::Matrix2d::Identity();
      lift -= 0.5 * (T.row(1).dot(n_len));
    }
  }
  return lift;
}

Eigen::Matrix2Xd body_test_field(const TaylorHoodSpace& V, const Vec2& dir, int layers) {
  require_body(V, "body_test_field");
  const auto& tag = V.node_tag();
  std::vector<char> on(V.num_p2(), 0);
  for (int k = 0; k < V.num_p2(); ++k) on[k] = tag[k] == kBody;
  for (int layer = 0; layer < layers; ++layer) {
    std::vector<char> next = on;
    for (int t = 0; t < V.mesh().num_triangles(); ++t) {
      bool touch = false;
      for (int i = 0; i < 3; ++i) touch = touch || on[V.dofs()(i, t)];
      if (!touch) continue;
      for (int k = 0; k < 6; ++k) {
        const int n = V.dofs()(k, t);
        if (tag[n] < 0) next[n] = 1;
      }
    }
    on.swap(next);
  }
  Eigen::Matrix2Xd phi = Eigen::Matrix2Xd::Zero(2, V.num_p2());
  for (int k = 0; k < V.num_p2(); ++k)
    if (on[k]) phi.col(k) = dir;
  return phi;
}

double volume_force(const FlowField& F, const Eigen::Matrix2Xd& phi) {
  const TaylorHoodSpace& V = *F.space;
  VecX R;
  AssemblyOptions opt;
  opt.form = F.convection;
  assemble(V, pack(V, F.velocity, F.pressure), R, nullptr, opt);
  return -residual_pairing(V, R, phi);
}

double lift_volume(const FlowField& F) { return volume_force(F, body_test_field(*F.space, Vec2(0, 1))); }

double drag_volume(const FlowField& F) { return volume_force(F, body_test_field(*F.space, Vec2(1, 0))); }

double lift_volume_frozen(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& u, const VecX& p,
                          const Eigen::Matrix2Xd& advecting, ConvectionForm form) {
  VecX R;
  AssemblyOptions opt;
  opt.form = form;
  opt.advecting = &advecting;
  assemble(V, pack(V, u, p), R, nullptr, opt);
  return -residual_pairing(V, R, body_test_field(V, Vec2(0, 1)));
}

double LiftCurve::sup_norm() const {
  double m = 0;
  for (double l : lifts) m = std::max(m, std::abs(l));
  return m;
}

std::size_t LiftCurve::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < lifts.size(); ++i)
    if (std::abs(lifts[i]) > std::abs(lifts[best])) best = i;
  return best;
}

std::string flow_fingerprint(const FlowShapePair& pair) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  };
  for (const FlowProfile* v : {&pair.v_in, &pair.v_out}) {
    const double H = v->H();
    mix(&H, sizeof H);
    mix(v->nodes().data(), sizeof(double) * v->nodes().size());
  }
  mix(&pair.U, sizeof pair.U);
  return hex(h);
}

LiftCurve lift_curve(const Mesh& M, const FlowShapePair& pair, std::vector<double> lambdas, const SolverConfig& cfg,
                     const LiftCurveOptions& opt) {
  for (double l : lambdas)
    if (!std::isfinite(l) || l < 0) throw InvalidArgument("lift_curve: lambdas must be finite and nonnegative");
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  if (lambdas.empty() || lambdas.front() != 0) lambdas.insert(lambdas.begin(), 0.0);

  LiftCurve C;
  C.mesh_id = hex(fingerprint(M));
  C.flow_id = flow_fingerprint(pair);
  auto V = std::make_shared<const TaylorHoodSpace>(std::make_shared<const Mesh>(M));
  require_body(*V, "lift_curve");

  C.lambdas.push_back(0);
  C.lifts.push_back(0);
  C.residuals.push_back(0);
  const std::vector<double> rest(lambdas.begin() + 1, lambdas.end());

  if (opt.warm_start || opt.threads <= 1) {
    std::optional<FlowField> prev;
    for (double l : rest) {
      try {
        FlowField F = solve_steady_ns(V, {l, pair}, cfg, opt.warm_start && prev ? &*prev : nullptr);
        C.lambdas.push_back(l);
        C.lifts.push_back(lift_volume(F));
        C.residuals.push_back(F.residual);
        prev = std::move(F);
      } catch (const Error& e) {
        C.truncated = true;
        C.failure = "lambda=" + std::to_string(l) + ": " + e.what();
        break;
      }
    }
    return C;
  }

  struct Sample {
    double lift = 0, residual = 0;
    std::string error;
  };
  std::vector<Sample> out(rest.size());
  const std::size_t threads = static_cast<std::size_t>(opt.threads);
  for (std::size_t start = 0; start < rest.size(); start += threads) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = start; i < std::min(rest.size(), start + threads); ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        try {
          FlowField F = solve_steady_ns(V, {rest[i], pair}, cfg);
          out[i].lift = lift_volume(F);
          out[i].residual = F.residual;
        } catch (const Error& e) {
          out[i].error = e.what();
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (!out[i].error.empty()) {
      C.truncated = true;
      C.failure = "lambda=" + std::to_string(rest[i]) + ": " + out[i].error;
      break;
    }
    C.lambdas.push_back(rest[i]);
    C.lifts.push_back(out[i].lift);
    C.residuals.push_back(out[i].residual);
  }
  return C;
}

}  // namespace liftlab
