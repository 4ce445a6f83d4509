#ifndef LIFTLAB_LIFT_HPP
#define LIFTLAB_LIFT_HPP

// Lift on the body: a stress integral over the body boundary and the
// residual-based volume form, which is the primary evaluator.

#include "liftlab/common.hpp"
#include "liftlab/ns_solver.hpp"

#include <string>
#include <vector>

namespace liftlab {

/// -e2 . int_{dB} (grad u + grad u^T - p I) n, n the outward normal of the
/// fluid domain. Gradients are taken from the adjacent triangle.
double lift_boundary(const FlowField& F);

/// P2 test field equal to `dir` on every body node and zero on the outer
/// boundary. `layers` > 0 also sets it on the nodes of that many rings of
/// triangles around the body.
Eigen::Matrix2Xd body_test_field(const TaylorHoodSpace& V, const Vec2& dir, int layers = 0);

/// -R(phi) with R the weak residual of the solve and phi a test field from
/// body_test_field; the force component along phi's body value.
double volume_force(const FlowField& F, const Eigen::Matrix2Xd& phi);

/// volume_force with phi = e2 on the body nodes.
double lift_volume(const FlowField& F);

/// volume_force with phi = e1; |drag| is the force scale of a configuration.
double drag_volume(const FlowField& F);

/// Same functional with convection frozen at `advecting`; linear in (u, p).
double lift_volume_frozen(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& u, const VecX& p,
                          const Eigen::Matrix2Xd& advecting, ConvectionForm form = ConvectionForm::Standard);

struct LiftCurve {
  std::vector<double> lambdas;
  std::vector<double> lifts;
  std::vector<double> residuals;
  std::string mesh_id;
  std::string flow_id;
  bool truncated = false;
  std::string failure;

  /// max |lift| over the samples.
  double sup_norm() const;
  /// Sample index of the largest |lift|.
  std::size_t argmax() const;
};

struct LiftCurveOptions {
  /// Warm-started curves run sequentially.
  bool warm_start = true;
  int threads = 1;
};

/// Solves at every lambda of the (sorted, deduplicated) grid with 0 prepended
/// when missing. A solver failure truncates the curve and is recorded.
LiftCurve lift_curve(const Mesh& M, const FlowShapePair& pair, std::vector<double> lambdas, const SolverConfig& cfg,
                     const LiftCurveOptions& opt = {});

std::string flow_fingerprint(const FlowShapePair& pair);

}  // namespace liftlab

#endif  // LIFTLAB_LIFT_HPP
