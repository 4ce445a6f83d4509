#ifndef LIFTLAB_FLOWSHAPE_HPP
#define LIFTLAB_FLOWSHAPE_HPP

// Inflow/outflow profiles on [-H, H]: W^{1,inf} norm, flux, parity
// decomposition and the odd-part homotopy that carries a flow shape to its
// mirror image without passing through an even profile.

#include "liftlab/common.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace liftlab {

/// Piecewise-linear profile on N uniform nodes spanning [-H, H].
///
/// Profiles built from a closed-form quadratic keep the polynomial alongside
/// the samples; evaluation, norm and flux then use the exact polynomial while
/// node-based operations (parity split, homotopy) use the samples.
class FlowProfile {
 public:
  static constexpr int kDefaultNodes = 129;
  static constexpr int kMinNodes = 33;

  FlowProfile(double H, VecX nodes);
  FlowProfile(double H, VecX nodes, std::optional<Eigen::Vector3d> exact);

  static FlowProfile from_function(double H, int n, const std::function<double(double)>& f);
  /// c[0] + c[1] x + c[2] x^2, sampled and kept exactly.
  static FlowProfile quadratic(double H, int n, const Eigen::Vector3d& c);
  static FlowProfile zero(double H, int n = kDefaultNodes);

  double H() const { return H_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double spacing() const { return 2 * H_ / (size() - 1); }
  /// Node abscissa, computed so that x(n-1-i) == -x(i) exactly.
  double x(int i) const;
  const VecX& nodes() const { return nodes_; }
  const std::optional<Eigen::Vector3d>& exact() const { return exact_; }

  double operator()(double x) const;

  /// Same profile without the closed form.
  FlowProfile sampled() const { return FlowProfile(H_, nodes_); }

  friend FlowProfile operator+(const FlowProfile& a, const FlowProfile& b);
  friend FlowProfile operator*(double s, const FlowProfile& a);

 private:
  double H_;
  VecX nodes_;
  std::optional<Eigen::Vector3d> exact_;
};

inline FlowProfile operator-(const FlowProfile& a, const FlowProfile& b) { return a + (-1.0) * b; }

/// 3(H^2 - x^2) / (4H^3): zero at both walls, unit flux.
FlowProfile poiseuille(double H, int n = FlowProfile::kDefaultNodes);
/// (x + H)/(2H) + c(H^2 - x^2) with c = 3(1-H)/(4H^3): zero at the bottom,
/// one at the top, unit flux.
FlowProfile couette(double H, int n = FlowProfile::kDefaultNodes);

struct FlowShapePair {
  FlowProfile v_in;
  FlowProfile v_out;
  int U = 0;
};

struct FlowClassParams {
  double r = 0;
  int U = 0;
  double flux_tol = 1e-9;
};

/// sup |V| + sup |V'|.
double w1inf_norm(const FlowProfile& v);
double w1inf_norm(const FlowShapePair& p);
double flux(const FlowProfile& v);

/// Adds a multiple of (H^2 - x^2) so the flux is exactly one; endpoints unchanged.
FlowProfile renormalize_flux(const FlowProfile& v);

/// Throws unless r is positive and admits the baseline pair of class U.
void validate(const FlowClassParams& c, double H);

Report is_admissible_flow(const FlowShapePair& p, const FlowClassParams& c);

/// (even, odd) with even(x) = (V(x)+V(-x))/2 and odd(x) = (V(x)-V(-x))/2.
std::pair<FlowProfile, FlowProfile> even_odd_split(const FlowProfile& v);

struct OddZeros {
  bool identically_zero = false;
  /// Sorted, symmetric about 0, contains 0.
  std::vector<double> zeros;
};

/// Sign changes of an odd profile's interpolant inside (-H, H).
OddZeros find_odd_zeros(const FlowProfile& odd);

FlowShapePair reflect_flow(const FlowShapePair& p);

/// Continuous path from P (delta = 0) to reflect_flow(P) (delta = 1) that only
/// changes odd parts, keeps them nonzero, and stays in the class C.
FlowShapePair flow_homotopy(const FlowShapePair& p, double delta, const FlowClassParams& c);

/// Largest s in [0, 1] with ||e_in + s o_in|| + ||e_out + s o_out|| <= r.
double odd_shrink_factor(const FlowProfile& e_in, const FlowProfile& o_in, const FlowProfile& e_out,
                         const FlowProfile& o_out, double r);

}  // namespace liftlab

#endif  // LIFTLAB_FLOWSHAPE_HPP
