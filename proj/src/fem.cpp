#include "liftlab/fem.hpp"

#include <cmath>

namespace liftlab {

namespace {

constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat26 = Eigen::Matrix<double, 2, 6>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Element = ElementGeometry;

Mat26 gather(const Eigen::Matrix2Xd& f, const TaylorHoodSpace& V, int t) {
  Mat26 out;
  for (int k = 0; k < 6; ++k) out.col(k) = f.col(V.dofs()(k, t));
  return out;
}

// Local residual and Jacobian; velocity unknown (k, c) sits at 2k + c,
// pressure at 12 + v.
void element_system(const Element& E, const Mat26& U, const Eigen::Vector3d& P, const Mat26* W,
                    const AssemblyOptions& opt, bool jac, Vec15& R, Mat15& J) {
  const auto& rule = triangle_rule();
  const bool skew = opt.form == ConvectionForm::Skew;
  const bool full_newton = opt.lin == Linearization::Newton && W == nullptr;
  R.setZero();
  if (jac) J.setZero();
  Vec6 phi;
  Mat26 dphi;
  for (int q = 0; q < 7; ++q) {
    const Eigen::Vector3d& l = rule.bary[q];
    const double w = rule.weight[q] * E.area;
    p2_basis(l, E.grad_bary, phi, dphi);
    const Vec2 u = U * phi;
    const Eigen::Matrix2d G = U * dphi.transpose();  // G(c, d) = d_d u_c
    const double ph = P.dot(l);
    const Vec2 a = W ? Vec2(*W * phi) : u;
    const Vec6 adv = dphi.transpose() * a;  // a . grad phi_j
    const Vec2 conv = G * a;

    for (int k = 0; k < 6; ++k) {
      for (int c = 0; c < 2; ++c) {
        double r = dphi.col(k).dot(G.row(c)) - ph * dphi(c, k);
        r += skew ? 0.5 * (conv(c) * phi(k) - adv(k) * u(c)) : conv(c) * phi(k);
        R(2 * k + c) += w * r;
      }
    }
    const double div = G.trace();
    for (int v = 0; v < 3; ++v) R(12 + v) -= w * l(v) * div;
    if (!jac) continue;

    const Eigen::Matrix<double, 6, 6> K = dphi.transpose() * dphi;
    for (int k = 0; k < 6; ++k) {
      for (int j = 0; j < 6; ++j) {
        const double diag = K(k, j) + (skew ? 0.5 * (adv(j) * phi(k) - adv(k) * phi(j)) : phi(k) * adv(j));
        for (int c = 0; c < 2; ++c) {
          J(2 * k + c, 2 * j + c) += w * diag;
          if (!full_newton) continue;
          for (int d = 0; d < 2; ++d) {
            double v = phi(k) * phi(j) * G(c, d);
            v = skew ? 0.5 * (v - phi(j) * dphi(d, k) * u(c)) : v;
            J(2 * k + c, 2 * j + d) += w * v;
          }
        }
      }
      for (int v = 0; v < 3; ++v) {
        for (int c = 0; c < 2; ++c) {
          const double b = -w * l(v) * dphi(c, k);
          J(2 * k + c, 12 + v) += b;
          J(12 + v, 2 * k + c) += b;
        }
      }
    }
  }
}

}  // namespace

ElementGeometry element_geometry(const Mesh& M, int t) {
  const Vec2 a = M.node(M.triangles(0, t)), b = M.node(M.triangles(1, t)), c = M.node(M.triangles(2, t));
  ElementGeometry E;
  const double twice = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  E.area = twice / 2;
  E.grad_bary.col(0) = Vec2(b.y() - c.y(), c.x() - b.x()) / twice;
  E.grad_bary.col(1) = Vec2(c.y() - a.y(), a.x() - c.x()) / twice;
  E.grad_bary.col(2) = Vec2(a.y() - b.y(), b.x() - a.x()) / twice;
  return E;
}

void p2_basis(const Eigen::Vector3d& l, const Eigen::Matrix<double, 2, 3>& gl, Vec6& phi, Mat26& dphi) {
  for (int i = 0; i < 3; ++i) {
    phi(i) = l(i) * (2 * l(i) - 1);
    dphi.col(i) = (4 * l(i) - 1) * gl.col(i);
  }
  for (int k = 0; k < 3; ++k) {
    const int a = kEdge[k][0], b = kEdge[k][1];
    phi(3 + k) = 4 * l(a) * l(b);
    dphi.col(3 + k) = 4 * (l(a) * gl.col(b) + l(b) * gl.col(a));
  }
}

const TriangleRule& triangle_rule() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double s = std::sqrt(15.0);
    const double a1 = (6 - s) / 21, b1 = (9 + 2 * s) / 21, w1 = (155 - s) / 1200;
    const double a2 = (6 + s) / 21, b2 = (9 - 2 * s) / 21, w2 = (155 + s) / 1200;
    r.bary[0] = Eigen::Vector3d::Constant(1.0 / 3);
    r.weight[0] = 9.0 / 40;
    r.bary[1] = {a1, a1, b1};
    r.bary[2] = {a1, b1, a1};
    r.bary[3] = {b1, a1, a1};
    r.bary[4] = {a2, a2, b2};
    r.bary[5] = {a2, b2, a2};
    r.bary[6] = {b2, a2, a2};
    for (int q = 1; q <= 3; ++q) r.weight[q] = w1;
    for (int q = 4; q <= 6; ++q) r.weight[q] = w2;
    return r;
  }();
  return rule;
}

TaylorHoodSpace::TaylorHoodSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw InvalidArgument("TaylorHoodSpace: null mesh");
  const Mesh& M = *mesh_;
  const int nv = M.num_nodes(), nt = M.num_triangles();
  dofs_.resize(6, nt);
  std::vector<Vec2> mids;
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) dofs_(i, t) = M.triangles(i, t);
    for (int k = 0; k < 3; ++k) {
      const int a = M.triangles(kEdge[k][0], t), b = M.triangles(kEdge[k][1], t);
      const auto key = std::minmax(a, b);
      auto [it, fresh] = edge_id_.emplace(std::pair<int, int>(key.first, key.second), nv + static_cast<int>(mids.size()));
      if (fresh) mids.push_back((M.node(a) + M.node(b)) / 2);
      dofs_(3 + k, t) = it->second;
    }
  }
  points_.resize(2, nv + static_cast<Eigen::Index>(mids.size()));
  points_.leftCols(nv) = M.nodes;
  for (std::size_t i = 0; i < mids.size(); ++i) points_.col(nv + static_cast<Eigen::Index>(i)) = mids[i];

  // Lower rank wins at shared corner nodes.
  auto rank = [](int tag) {
    switch (static_cast<BoundaryTag>(tag)) {
      case BoundaryTag::BodyBoundary: return 0;
      case BoundaryTag::GammaBottom:
      case BoundaryTag::GammaTop: return 1;
      default: return 2;
    }
  };
  node_tag_.assign(num_p2(), -1);
  boundary_nodes_.resize(3, M.num_boundary_edges());
  for (int e = 0; e < M.num_boundary_edges(); ++e) {
    const int a = M.boundary_edges(0, e), b = M.boundary_edges(1, e);
    boundary_nodes_.col(e) << a, b, edge_node(a, b);
    const int tag = static_cast<int>(M.boundary_tags[e]);
    for (int n : {a, b, boundary_nodes_(2, e)})
      if (node_tag_[n] < 0 || rank(tag) < rank(node_tag_[n])) node_tag_[n] = tag;
  }
}

int TaylorHoodSpace::edge_node(int a, int b) const {
  const auto it = edge_id_.find({std::min(a, b), std::max(a, b)});
  return it == edge_id_.end() ? -1 : it->second;
}

void assemble(const TaylorHoodSpace& V, const VecX& x, VecX& R, std::vector<Eigen::Triplet<double>>* J,
              const AssemblyOptions& opt) {
  if (x.size() != V.size()) throw InvalidArgument("assemble: state vector has the wrong size");
  const Mesh& M = V.mesh();
  const Eigen::Matrix2Xd u = unpack_velocity(V, x);
  R.setZero(V.size());
  Vec15 Rl;
  Mat15 Jl;
  std::array<int, 15> idx;
  for (int t = 0; t < M.num_triangles(); ++t) {
    for (int k = 0; k < 6; ++k) {
      idx[2 * k] = 2 * V.dofs()(k, t);
      idx[2 * k + 1] = 2 * V.dofs()(k, t) + 1;
    }
    Eigen::Vector3d P;
    for (int v = 0; v < 3; ++v) {
      idx[12 + v] = V.pressure_index(M.triangles(v, t));
      P(v) = x(idx[12 + v]);
    }
    const Mat26 U = gather(u, V, t);
    Mat26 W;
    if (opt.advecting) W = gather(*opt.advecting, V, t);
    element_system(element_geometry(M, t), U, P, opt.advecting ? &W : nullptr, opt, J != nullptr, Rl, Jl);
    for (int i = 0; i < 15; ++i) R(idx[i]) += Rl(i);
    if (!J) continue;
    for (int i = 0; i < 15; ++i) {
      const int gi = opt.index_map ? (*opt.index_map)[idx[i]] : idx[i];
      if (gi < 0) continue;
      for (int j = 0; j < 15; ++j) {
        const int gj = opt.index_map ? (*opt.index_map)[idx[j]] : idx[j];
        if (gj >= 0) J->emplace_back(gi, gj, Jl(i, j));
      }
    }
  }
}

double trilinear(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& f, const Eigen::Matrix2Xd& g,
                 const Eigen::Matrix2Xd& h, ConvectionForm form) {
  const Mesh& M = V.mesh();
  const auto& rule = triangle_rule();
  double sum = 0;
  Vec6 phi;
  Mat26 dphi;
  for (int t = 0; t < M.num_triangles(); ++t) {
    const Element E = element_geometry(M, t);
    const Mat26 F = gather(f, V, t), Gn = gather(g, V, t), Hn = gather(h, V, t);
    for (int q = 0; q < 7; ++q) {
      p2_basis(rule.bary[q], E.grad_bary, phi, dphi);
      const Vec2 fq = F * phi, gq = Gn * phi, hq = Hn * phi;
      const Eigen::Matrix2d Dg = Gn * dphi.transpose(), Dh = Hn * dphi.transpose();
      double v = (Dg * fq).dot(hq);
      if (form == ConvectionForm::Skew) v = 0.5 * (v - (Dh * fq).dot(gq));
      sum += rule.weight[q] * E.area * v;
    }
  }
  return sum;
}

VecX pack(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& u, const VecX& p) {
  VecX x(V.size());
  x.head(V.velocity_size()) = Eigen::Map<const VecX>(u.data(), V.velocity_size());
  x.tail(V.num_vertices()) = p;
  return x;
}

Eigen::Matrix2Xd unpack_velocity(const TaylorHoodSpace& V, const VecX& x) {
  return Eigen::Map<const Eigen::Matrix2Xd>(x.data(), 2, V.num_p2());
}

VecX unpack_pressure(const TaylorHoodSpace& V, const VecX& x) { return x.tail(V.num_vertices()); }

}  // namespace liftlab
