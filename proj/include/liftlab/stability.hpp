#ifndef LIFTLAB_STABILITY_HPP
#define LIFTLAB_STABILITY_HPP

// Zero-lift search along a body/flow homotopy, the instability measure gamma
// (sup of the lift sup-norm over admissible flow shapes) and derivative-free
// shape optimization of gamma over convex polygons.

#include "liftlab/common.hpp"
#include "liftlab/flowshape.hpp"
#include "liftlab/geometry.hpp"
#include "liftlab/lift.hpp"
#include "liftlab/mesh.hpp"
#include "liftlab/ns_solver.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace liftlab {

class NoSignChange : public Error {
 public:
  using Error::Error;
};

/// t in [0, 1] -> (eps(t), delta(t)) -> (body, flow). Every body on the path is
/// meshed by morphing `reference`, so the lift is continuous in t.
struct HomotopyPath {
  std::function<double(double)> eps = [](double t) { return t; };
  std::function<double(double)> delta = [](double t) { return t; };
  std::function<Body(double)> body_at;
  std::function<FlowShapePair(double)> flow_at;
  std::shared_ptr<const Mesh> reference;
  /// Corner slots of the body at a given eps, matched between the reference
  /// and the target by anchored_boundary_map. Unset uses the radial map.
  std::function<std::vector<Vec2>(double)> anchors_at;
  double reference_eps = 0.5;
  /// Used to mesh afresh where the slot map degenerates (a zero-length arc).
  MeshOptions mesh_options;
  double lambda = 0.5;

  Body body(double t) const { return body_at(eps(t)); }
  FlowShapePair flow(double t) const { return flow_at(delta(t)); }
  /// Morph of `reference`; a fresh mesh only where the slot map degenerates.
  Mesh mesh(double t) const;
  /// eps and delta vanish at 0, end in {0, 1} at 1, and stay in [0, 1] on a
  /// sample of t.
  Report check() const;
};

/// The trapezium family B_eps and the odd-part flow homotopy, reference mesh
/// at B_{1/2}.
HomotopyPath trapezium_path(const Rectd& R, const Trapezium& body, const FlowShapePair& pair, const FlowClassParams& C,
                            double lambda, const MeshOptions& mesh);

/// Fixed body; the flow follows the odd-part homotopy, or stays fixed when
/// the pair is even.
HomotopyPath fixed_body_path(const Rectd& R, const Body& body, const FlowShapePair& pair, const FlowClassParams& C,
                             double lambda, const MeshOptions& mesh);

struct ZeroLiftOptions {
  int max_bisections = 20;
  /// 0 picks max(1e-6 * scale, 10 * newton_tol), scale = |drag| at t = 0.
  double lift_tol = 0;
  /// Endpoint lifts below noise_rel * scale count as zero.
  double noise_rel = 1e-8;
};

struct ZeroLiftResult {
  double t = 0, eps = 0, delta = 0;
  double lift = 0;
  /// Lift from a fresh cold solve at t.
  double verified_lift = 0;
  double lift_tol = 0;
  double noise_floor = 0;
  double scale = 0;
  int solves = 0;
  /// (t, lift) in evaluation order.
  std::vector<std::pair<double, double>> trace;
  /// Bracket width after each bisection.
  std::vector<double> widths;
};

/// Bisection on Phi(t) = lift on the path. Throws NoSignChange when the
/// endpoint lifts are below the noise floor or share a sign.
ZeroLiftResult zero_lift_search(const HomotopyPath& path, const SolverConfig& cfg, const ZeroLiftOptions& opt = {});

/// Flow shapes as base + (1 - s^2) sum_k (a_k s^(2k) - a_k c_k) + (1 - s^2) sum_k b_k s^(2k-1),
/// s = x2 / H, c_k making each even mode flux-free. The m even and m odd
/// coefficients are split between V_in (first half) and V_out.
struct FlowParameterization {
  double H = 1;
  int U = 0;
  int m = 6;
  int nodes = FlowProfile::kDefaultNodes;
  /// External coordinate i drives canonical coefficient order[i]; empty is
  /// the identity. Canonical order: even in, even out, odd in, odd out.
  std::vector<int> order;

  int dim() const { return 2 * m; }
  /// Unprojected pair for canonical coefficients.
  FlowShapePair raw(const VecX& canonical) const;
  /// Pair shrunk into the class: the even part toward the base until it fits
  /// the budget, then the odd part by odd_shrink_factor.
  FlowShapePair pair(const VecX& z, const FlowClassParams& C) const;
  VecX to_canonical(const VecX& z) const;
  VecX from_canonical(const VecX& c) const;
  std::string fingerprint() const;
};

struct GammaOptions {
  Rectd R{5, 1};
  MeshOptions mesh;
  int m = 6;
  std::vector<int> basis_order;
  /// Pair evaluations (lift curves) allowed; 0 evaluates the base pair only.
  int budget = 40;
  int restarts = 2;
  std::uint64_t seed = 1;
  int coarse_points = 17;
  int refine_passes = 2;
  int refine_points = 8;
  /// Initial simplex edge in coefficient units.
  double step = 0.5;
  /// Evaluate the odd coefficients with flipped sign (mirror parameterization).
  bool mirrored = false;
};

struct GammaTraceEntry {
  int evaluation = 0;
  std::string flow_id;
  double sup = 0;
  double argmax_lambda = 0;
  double seconds = 0;
};

struct GammaEstimate {
  double value = 0;
  std::optional<FlowShapePair> argmax_pair;
  VecX argmax_coefficients;
  double argmax_lambda = 0;
  std::vector<GammaTraceEntry> trace;
  std::string mesh_id;
  std::string parameterization_id;
  int solves = 0;
};

/// Sup over lambda of |lift| on an adaptive grid: coarse_points samples of
/// [0, lambda_max], then refine_passes passes of refine_points samples
/// around the running max.
LiftCurve adaptive_lift_sup(const Mesh& M, const FlowShapePair& pair, double lambda_max, const SolverConfig& cfg,
                            const GammaOptions& opt);

/// Lower bound of gamma restricted to the parameterization, by Nelder-Mead
/// with random restarts. The base pair is always evaluated first.
GammaEstimate gamma_estimate(const Body& B, const FlowClassParams& C, double lambda_max, const SolverConfig& cfg,
                             const GammaOptions& opt = {});

struct ShapeOptOptions {
  GammaOptions gamma;
  int vertices = 8;
  /// Generations of the evolution strategy; 0 returns the projected start.
  int generations = 4;
  int population = 4;
  double sigma = 0.05;
  std::uint64_t seed = 7;
  int threads = 1;
  int max_projection_iters = 50;
  std::optional<Body> initial;
  /// Non-empty restricts the search to these shapes (each projected).
  std::vector<Body> candidates;
};

struct ShapeOptIterate {
  Body body;
  double gamma = 0;
  double best_so_far = 0;
  Report admissible;
};

struct ShapeOptResult {
  Body best;
  double gamma = 0;
  std::vector<ShapeOptIterate> history;
  Report feasibility;
};

/// Hull, scale about the centroid to area alpha, translate into D and clip,
/// repeated until admissible. Throws Error after max_iters.
Body project_to_class(const std::vector<Vec2>& points, const BodyClassd& bc, int max_iters = 50);

ShapeOptResult optimize_body(const BodyClassd& bc, const FlowClassParams& C, double lambda_max, const SolverConfig& cfg,
                             const ShapeOptOptions& opt = {});

enum class ProbeKind { Flow, Body };

struct ProbeConfig {
  Rectd R{5, 1};
  Body body;
  FlowShapePair pair;
  double lambda = 0.5;
  MeshOptions mesh;
  /// Flow probe: V_in gains size * psi with psi flux-free, zero at the walls
  /// and of unit W^{1,inf} norm. Body probe: the body moves by size * direction.
  Vec2 direction{0, 1};
  double tolerance = 1.0;
};

struct ProbeRow {
  double size = 0;
  double lift = 0;
  double difference = 0;
  std::string error;
};

struct ProbeTable {
  double base_lift = 0;
  std::vector<ProbeRow> rows;
  bool monotone = false;
  bool passed = false;
};

ProbeTable continuity_probe(ProbeKind kind, const ProbeConfig& base, const std::vector<double>& sizes,
                            const SolverConfig& cfg);

}  // namespace liftlab

#endif  // LIFTLAB_STABILITY_HPP
