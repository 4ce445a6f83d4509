#ifndef LIFTLAB_FEM_HPP
#define LIFTLAB_FEM_HPP

// Taylor-Hood P2/P1 space on a Mesh and the weak Navier-Stokes residual
//   R(v, q) = int grad u : grad v + c(u; u, v) - p div v - q div u
// with c the standard or skew-symmetric convection form.

#include "liftlab/common.hpp"
#include "liftlab/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <map>
#include <memory>
#include <vector>

namespace liftlab {

enum class ConvectionForm { Standard, Skew };

/// Velocity nodes are the mesh vertices followed by one midpoint per edge.
/// Global unknowns: u interleaved (2k + c) for P2 node k, then one pressure
/// per vertex.
class TaylorHoodSpace {
 public:
  explicit TaylorHoodSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  int num_vertices() const { return mesh_->num_nodes(); }
  int num_p2() const { return static_cast<int>(points_.cols()); }
  int velocity_size() const { return 2 * num_p2(); }
  int size() const { return velocity_size() + num_vertices(); }
  int pressure_index(int v) const { return velocity_size() + v; }

  /// Local P2 nodes of triangle t: vertices, then midpoints of (0,1), (1,2), (2,0).
  const Eigen::Matrix<int, 6, Eigen::Dynamic>& dofs() const { return dofs_; }
  const Eigen::Matrix2Xd& points() const { return points_; }
  /// Midpoint node of the edge between vertices a and b; -1 if absent.
  int edge_node(int a, int b) const;
  /// (a, b, midpoint) for each boundary edge of the mesh.
  const Eigen::Matrix3Xi& boundary_nodes() const { return boundary_nodes_; }
  /// Tag of each P2 node on the boundary, -1 inside. Corners belong to the walls.
  const std::vector<int>& node_tag() const { return node_tag_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  Eigen::Matrix<int, 6, Eigen::Dynamic> dofs_;
  Eigen::Matrix2Xd points_;
  std::map<std::pair<int, int>, int> edge_id_;
  Eigen::Matrix3Xi boundary_nodes_;
  std::vector<int> node_tag_;
};

/// Degree-5 seven-point rule on triangles; weights sum to one.
struct TriangleRule {
  std::array<Eigen::Vector3d, 7> bary;
  std::array<double, 7> weight;
};
const TriangleRule& triangle_rule();

struct ElementGeometry {
  double area = 0;
  /// Gradients of the barycentric coordinates.
  Eigen::Matrix<double, 2, 3> grad_bary;
};
ElementGeometry element_geometry(const Mesh& M, int t);

/// P2 shape functions and their gradients at barycentric point l.
void p2_basis(const Eigen::Vector3d& l, const Eigen::Matrix<double, 2, 3>& grad_bary,
              Eigen::Matrix<double, 6, 1>& phi, Eigen::Matrix<double, 2, 6>& dphi);

enum class Linearization { Newton, Picard };

struct AssemblyOptions {
  ConvectionForm form = ConvectionForm::Standard;
  Linearization lin = Linearization::Newton;
  /// Frozen P2 advecting field; the residual is then linear in x.
  const Eigen::Matrix2Xd* advecting = nullptr;
  /// Maps global unknowns to Jacobian rows/columns; negative entries are
  /// skipped. Null keeps every unknown.
  const std::vector<int>* index_map = nullptr;
};

/// Full residual at x, Dirichlet rows included. Jacobian triplets are
/// appended to J when it is given.
void assemble(const TaylorHoodSpace& V, const VecX& x, VecX& R, std::vector<Eigen::Triplet<double>>* J = nullptr,
              const AssemblyOptions& opt = {});

/// int (f . grad g) . h for the standard form, the skew form
/// (1/2)[(f . grad g) . h - (f . grad h) . g] otherwise.
double trilinear(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& f, const Eigen::Matrix2Xd& g,
                 const Eigen::Matrix2Xd& h, ConvectionForm form);

/// Packs (u, p) into the global layout and back.
VecX pack(const TaylorHoodSpace& V, const Eigen::Matrix2Xd& u, const VecX& p);
Eigen::Matrix2Xd unpack_velocity(const TaylorHoodSpace& V, const VecX& x);
VecX unpack_pressure(const TaylorHoodSpace& V, const VecX& x);

}  // namespace liftlab

#endif  // LIFTLAB_FEM_HPP
