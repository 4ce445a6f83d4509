#include "liftlab/flowshape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace liftlab {

FlowProfile::FlowProfile(double H, VecX nodes) : H_(H), nodes_(std::move(nodes)) {
  if (!(H > 0)) throw InvalidArgument("flow profile: H must be positive");
  if (nodes_.size() < kMinNodes) throw InvalidArgument("flow profile: at least 33 nodes required");
  if (!nodes_.allFinite()) throw InvalidArgument("flow profile: non-finite node value");
}

FlowProfile::FlowProfile(double H, VecX nodes, std::optional<Eigen::Vector3d> exact)
    : FlowProfile(H, std::move(nodes)) {
  exact_ = std::move(exact);
}

double FlowProfile::x(int i) const {
  const int n = size();
  return static_cast<double>(2 * i - (n - 1)) * H_ / static_cast<double>(n - 1);
}

FlowProfile FlowProfile::from_function(double H, int n, const std::function<double(double)>& f) {
  if (n < kMinNodes) throw InvalidArgument("flow profile: at least 33 nodes required");
  VecX v(n);
  FlowProfile grid(H, VecX::Zero(n));
  for (int i = 0; i < n; ++i) v[i] = f(grid.x(i));
  return FlowProfile(H, std::move(v));
}

FlowProfile FlowProfile::quadratic(double H, int n, const Eigen::Vector3d& c) {
  FlowProfile p = from_function(H, n, [&](double x) { return c[0] + x * (c[1] + x * c[2]); });
  p.exact_ = c;
  return p;
}

FlowProfile FlowProfile::zero(double H, int n) { return quadratic(H, n, Eigen::Vector3d::Zero()); }

double FlowProfile::operator()(double x) const {
  if (exact_) return (*exact_)[0] + x * ((*exact_)[1] + x * (*exact_)[2]);
  const int n = size();
  const double t = std::clamp((x + H_) / spacing(), 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(t), n - 2);
  const double w = t - i;
  return (1 - w) * nodes_[i] + w * nodes_[i + 1];
}

FlowProfile operator+(const FlowProfile& a, const FlowProfile& b) {
  if (a.H_ != b.H_ || a.size() != b.size()) throw InvalidArgument("flow profile: mismatched grids");
  FlowProfile out(a.H_, a.nodes_ + b.nodes_);
  if (a.exact_ && b.exact_) out.exact_ = *a.exact_ + *b.exact_;
  return out;
}

FlowProfile operator*(double s, const FlowProfile& a) {
  FlowProfile out(a.H_, s * a.nodes_);
  if (a.exact_) out.exact_ = s * *a.exact_;
  return out;
}

FlowProfile poiseuille(double H, int n) {
  const double k = 3.0 / (4.0 * H * H * H);
  return FlowProfile::quadratic(H, n, Eigen::Vector3d(k * H * H, 0.0, -k));
}

FlowProfile couette(double H, int n) {
  const double c = 3.0 * (1.0 - H) / (4.0 * H * H * H);
  return FlowProfile::quadratic(H, n, Eigen::Vector3d(0.5 + c * H * H, 1.0 / (2.0 * H), -c));
}

double w1inf_norm(const FlowProfile& v) {
  const double H = v.H();
  if (const auto& c = v.exact()) {
    auto val = [&](double x) { return std::abs((*c)[0] + x * ((*c)[1] + x * (*c)[2])); };
    double vmax = std::max(val(-H), val(H));
    if ((*c)[2] != 0.0) {
      const double xv = -(*c)[1] / (2.0 * (*c)[2]);
      if (std::abs(xv) < H) vmax = std::max(vmax, val(xv));
    }
    const double smax = std::max(std::abs((*c)[1] - 2.0 * (*c)[2] * H), std::abs((*c)[1] + 2.0 * (*c)[2] * H));
    return vmax + smax;
  }
  const VecX& n = v.nodes();
  const double dx = v.spacing();
  const double slope = (n.tail(n.size() - 1) - n.head(n.size() - 1)).cwiseAbs().maxCoeff() / dx;
  return n.cwiseAbs().maxCoeff() + slope;
}

double w1inf_norm(const FlowShapePair& p) { return w1inf_norm(p.v_in) + w1inf_norm(p.v_out); }

double flux(const FlowProfile& v) {
  const double H = v.H();
  if (const auto& c = v.exact()) return 2.0 * H * (*c)[0] + 2.0 * H * H * H * (*c)[2] / 3.0;
  const VecX& n = v.nodes();
  return v.spacing() * (n.sum() - 0.5 * (n[0] + n[n.size() - 1]));
}

FlowProfile renormalize_flux(const FlowProfile& v) {
  const double H = v.H();
  const FlowProfile bump = FlowProfile::quadratic(H, v.size(), Eigen::Vector3d(H * H, 0.0, -1.0));
  const FlowProfile base = v.exact() ? v : v.sampled();
  const FlowProfile b = v.exact() ? bump : bump.sampled();
  return base + ((1.0 - flux(base)) / flux(b)) * b;
}

void validate(const FlowClassParams& c, double H) {
  if (!(c.r > 0)) throw InvalidArgument("flow class: r must be positive");
  if (c.U != 0 && c.U != 1) throw InvalidArgument("flow class: U must be 0 or 1");
  if (!(c.flux_tol > 0)) throw InvalidArgument("flow class: flux_tol must be positive");
  const FlowProfile base = c.U == 0 ? poiseuille(H) : couette(H);
  const double need = 2.0 * w1inf_norm(base);
  if (need > c.r)
    throw InvalidArgument("flow class: r = " + std::to_string(c.r) + " below the baseline pair norm " +
                          std::to_string(need));
}

Report is_admissible_flow(const FlowShapePair& p, const FlowClassParams& c) {
  Report rep;
  if (p.U != c.U) rep.violations.push_back("class: pair U differs from class U");
  const double norm = w1inf_norm(p);
  if (norm > c.r * (1.0 + 1e-12))
    rep.violations.push_back("norm: ||V_in|| + ||V_out|| = " + std::to_string(norm) + " exceeds r = " +
                             std::to_string(c.r));
  const double tol = 1e-12;
  for (const auto* v : {&p.v_in, &p.v_out}) {
    const char* name = v == &p.v_in ? "V_in" : "V_out";
    const double H = v->H();
    if (std::abs((*v)(-H)) > tol || std::abs(v->nodes()[0]) > tol)
      rep.violations.push_back(std::string("endpoint: ") + name + "(-H) != 0");
    if (std::abs((*v)(H) - c.U) > tol || std::abs(v->nodes()[v->size() - 1] - c.U) > tol)
      rep.violations.push_back(std::string("endpoint: ") + name + "(H) != U");
    if (std::abs(flux(*v) - 1.0) > c.flux_tol)
      rep.violations.push_back(std::string("flux: ") + name + " flux = " + std::to_string(flux(*v)));
  }
  return rep;
}

std::pair<FlowProfile, FlowProfile> even_odd_split(const FlowProfile& v) {
  const VecX& n = v.nodes();
  const VecX r = n.reverse();
  std::optional<Eigen::Vector3d> even_c, odd_c;
  if (const auto& c = v.exact()) {
    even_c = Eigen::Vector3d((*c)[0], 0.0, (*c)[2]);
    odd_c = Eigen::Vector3d(0.0, (*c)[1], 0.0);
  }
  return {FlowProfile(v.H(), 0.5 * (n + r), even_c), FlowProfile(v.H(), 0.5 * (n - r), odd_c)};
}

OddZeros find_odd_zeros(const FlowProfile& odd) {
  const VecX& n = odd.nodes();
  const int N = odd.size();
  const double amp = n.cwiseAbs().maxCoeff();
  OddZeros out;
  if (amp == 0.0) {
    out.identically_zero = true;
    return out;
  }
  if ((n + n.reverse()).cwiseAbs().maxCoeff() > 1e-12 * amp)
    throw InvalidArgument("find_odd_zeros: profile is not antisymmetric");
  const double tiny = 1e-12 * amp;

  // Scan x > 0 and mirror; node values within `tiny` of zero count as zeros.
  // The endpoint x = H is excluded.
  std::vector<double> pos;
  int prev = -1;
  for (int i = N / 2; i < N - 1; ++i) {
    const double xi = odd.x(i);
    if (xi <= 0.0) continue;
    if (std::abs(n[i]) <= tiny) {
      pos.push_back(xi);
      prev = -1;
      continue;
    }
    if (prev >= 0 && (n[prev] > 0) != (n[i] > 0)) {
      const double xp = odd.x(prev);
      pos.push_back(xp + (xi - xp) * n[prev] / (n[prev] - n[i]));
    }
    prev = i;
  }
  out.zeros.push_back(0.0);
  for (double z : pos) {
    out.zeros.push_back(z);
    out.zeros.push_back(-z);
  }
  std::sort(out.zeros.begin(), out.zeros.end());
  return out;
}

FlowShapePair reflect_flow(const FlowShapePair& p) {
  if (p.U != 0) throw InvalidArgument("reflect_flow: reflection breaks the endpoint condition when U = 1");
  auto flip = [](const FlowProfile& v) {
    std::optional<Eigen::Vector3d> c;
    if (v.exact()) c = Eigen::Vector3d((*v.exact())[0], -(*v.exact())[1], (*v.exact())[2]);
    return FlowProfile(v.H(), v.nodes().reverse(), c);
  };
  return {flip(p.v_in), flip(p.v_out), p.U};
}

namespace {

/// |x_i| computed from the integer offset so mirrored nodes agree exactly.
double abs_x(const FlowProfile& v, int i) {
  const int n = v.size();
  return static_cast<double>(std::abs(2 * i - (n - 1))) * v.H() / static_cast<double>(n - 1);
}

/// Sign flip of the outer lobes (|x| >= x*) on [0, 1/2], then of the inner
/// lobe on (1/2, 1].
VecX flip_three_zero(const FlowProfile& odd, double xstar, double delta) {
  const VecX& o = odd.nodes();
  VecX out(o.size());
  for (int i = 0; i < odd.size(); ++i) {
    const bool outer = abs_x(odd, i) >= xstar;
    if (delta <= 0.5)
      out[i] = outer ? (1.0 - 4.0 * delta) * o[i] : o[i];
    else
      out[i] = outer ? -o[i] : (3.0 - 4.0 * delta) * o[i];
  }
  return out;
}

VecX odd_homotopy(const FlowProfile& odd, double delta) {
  const OddZeros z = find_odd_zeros(odd);
  if (z.identically_zero) return VecX::Zero(odd.size());
  const double H = odd.H();
  const double xstar = z.zeros.back();
  if (xstar > 0.0) return flip_three_zero(odd, xstar, delta);

  // Single zero: pinch the odd part with the even factor x^2 - x*^2 so it
  // gains zeros at +-x*, flip lobes as above, then release the pinch.
  const double xs = 0.5 * H;
  const VecX& o = odd.nodes();
  VecX pinch(o.size());
  for (int i = 0; i < odd.size(); ++i) {
    const double ax = abs_x(odd, i);
    pinch[i] = o[i] * (ax * ax - xs * xs);
  }
  pinch *= o.cwiseAbs().maxCoeff() / pinch.cwiseAbs().maxCoeff();
  if (delta <= 0.25) {
    const double s = 4.0 * delta;
    return (1.0 - s) * o + s * pinch;
  }
  if (delta <= 0.75) return flip_three_zero(FlowProfile(H, pinch), xs, 2.0 * (delta - 0.25));
  const double s = 4.0 * (delta - 0.75);
  return -((1.0 - s) * pinch + s * o);
}

}  // namespace

double odd_shrink_factor(const FlowProfile& e_in, const FlowProfile& o_in, const FlowProfile& e_out,
                         const FlowProfile& o_out, double r) {
  auto total = [&](double s) { return w1inf_norm(e_in + s * o_in) + w1inf_norm(e_out + s * o_out); };
  if (total(1.0) <= r) return 1.0;
  if (total(0.0) > r) return 0.0;
  // The norm is convex in s, so the feasible set is an interval [0, s_max].
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) <= r ? lo : hi) = mid;
  }
  return lo;
}

FlowShapePair flow_homotopy(const FlowShapePair& p, double delta, const FlowClassParams& c) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("flow_homotopy: delta outside [0,1]");
  if (p.U != 0) throw InvalidArgument("flow_homotopy: only defined for U = 0");
  auto [e_in, o_in] = even_odd_split(p.v_in.sampled());
  auto [e_out, o_out] = even_odd_split(p.v_out.sampled());
  if (find_odd_zeros(o_in).identically_zero && find_odd_zeros(o_out).identically_zero)
    throw InvalidArgument("flow_homotopy: both odd parts vanish; the pair is already even");
  if (delta == 0.0) return p;
  if (delta == 1.0) return reflect_flow(p);

  const FlowProfile d_in(p.v_in.H(), odd_homotopy(o_in, delta));
  const FlowProfile d_out(p.v_out.H(), odd_homotopy(o_out, delta));
  const double s = odd_shrink_factor(e_in, d_in, e_out, d_out, c.r);
  return {e_in + s * d_in, e_out + s * d_out, p.U};
}

}  // namespace liftlab
