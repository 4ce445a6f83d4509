#ifndef LIFTLAB_NS_SOLVER_HPP
#define LIFTLAB_NS_SOLVER_HPP

// Steady Navier-Stokes in the channel with inflow lambda*V_in, outflow
// lambda*V_out, top wall lambda*U and no slip elsewhere. Newton with
// continuation in lambda on Taylor-Hood elements.

#include "liftlab/common.hpp"
#include "liftlab/fem.hpp"
#include "liftlab/flowshape.hpp"
#include "liftlab/mesh.hpp"

#include <memory>
#include <string>
#include <vector>

namespace liftlab {

struct SolverConfig {
  double newton_tol = 1e-10;
  int max_newton_iters = 25;
  int continuation_steps = 1;
  ConvectionForm convection = ConvectionForm::Standard;
  /// Partial-pivoting threshold of the sparse LU, in [0, 1].
  double pivot_tol = 1.0;
  int max_step_halvings = 8;
  /// Picard steps taken after a Newton step fails to reduce the residual.
  int picard_fallback_iters = 3;
};

/// Throws InvalidArgument listing every bad field.
void validate(const SolverConfig& cfg);

struct BoundaryData {
  double lambda = 0;
  FlowShapePair pair;
};

struct SolverLogLine {
  int step = 0;
  double lambda = 0;
  int iteration = 0;
  double residual = 0;
  bool picard = false;
};

struct SolverStats {
  int continuation_steps = 0;
  int newton_iterations = 0;
  int picard_iterations = 0;
  int step_halvings = 0;
  /// Residuals of the last continuation step.
  std::vector<double> residual_history;
  std::vector<SolverLogLine> log;
};

struct FlowField {
  std::shared_ptr<const TaylorHoodSpace> space;
  /// Velocity at the P2 nodes.
  Eigen::Matrix2Xd velocity;
  /// Pressure at the vertices, zero mean.
  VecX pressure;
  double lambda = 0;
  double residual = 0;
  ConvectionForm convection = ConvectionForm::Standard;
  SolverStats stats;

  const Mesh& mesh() const { return space->mesh(); }
};

/// Nodal Dirichlet values at the boundary P2 nodes (zero elsewhere). The
/// outflow values get a multiple of (H^2 - x2^2) so the discrete net flux of
/// the quadratic interpolant vanishes; inflow values are left exact.
Eigen::Matrix2Xd dirichlet_values(const TaylorHoodSpace& V, const FlowShapePair& pair, double lambda);

FlowField solve_steady_ns(const Mesh& M, const BoundaryData& bd, const SolverConfig& cfg);

/// Warm start: continuation starts from `warm` when it lives on the same space.
FlowField solve_steady_ns(std::shared_ptr<const TaylorHoodSpace> V, const BoundaryData& bd, const SolverConfig& cfg,
                          const FlowField* warm = nullptr);

/// || grad u ||_{L2}, exact for the P2 field.
double dirichlet_energy(const FlowField& F);

/// Largest |int q div u| over the P1 pressure basis functions q.
double divergence_residual(const FlowField& F);

double pressure_mean(const FlowField& F);

/// min ||grad u||^2 / ||u||_{L4}^2 over H^1_0 of the rectangle, approximated
/// by inverse iteration on a P1 grid. Cached per rectangle.
double embedding_proxy(const Rectd& R);

enum class LambdaLimit { Cap, Newton, Contraction };
std::string to_string(LambdaLimit l);

struct LambdaSchedule {
  double start = 1;
  double cap = 64;
  int bisections = 6;
};

struct LambdaEstimate {
  double lambda = 0;
  LambdaLimit limit = LambdaLimit::Cap;
  double s0 = 0;
  /// (lambda, accepted) for every probe in order.
  std::vector<std::pair<double, bool>> probes;
};

/// Doubling then bisection on lambda; a probe is accepted when the solve
/// converges and ||grad u|| / s0 < 1.
LambdaEstimate estimate_lambda_max(const Mesh& M, const FlowShapePair& pair, const SolverConfig& cfg,
                                   const LambdaSchedule& schedule = {});

}  // namespace liftlab

#endif  // LIFTLAB_NS_SOLVER_HPP
