#ifndef LIFTLAB_MESH_HPP
#define LIFTLAB_MESH_HPP

// Triangulations of the channel with an obstacle removed. Generation is a
// constrained Delaunay triangulation with Ruppert refinement; an empty body
// gives a structured grid instead.

#include "liftlab/common.hpp"
#include "liftlab/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace liftlab {

enum class BoundaryTag : std::uint8_t { GammaBottom = 0, GammaTop, GammaLeft, GammaRight, BodyBoundary };

inline constexpr int kNumBoundaryTags = 5;

std::string_view to_string(BoundaryTag t);
/// Throws InvalidArgument on an unknown name.
BoundaryTag boundary_tag_from_string(std::string_view s);

struct MeshOptions {
  double h = 0.125;
  /// Edge length along the body; non-positive means h.
  double body_h = 0;
  /// Mesh the upper half and reflect it. Requires a symmetric body.
  bool mirror = false;
  double min_angle_deg = 20.5;
  int max_nodes = 500000;
};

struct Mesh {
  Eigen::Matrix2Xd nodes;
  Eigen::Matrix3Xi triangles;
  Eigen::Matrix2Xi boundary_edges;
  std::vector<BoundaryTag> boundary_tags;

  Rectd R;
  std::optional<Body> body;
  double h = 0;
  bool mirror_symmetric = false;

  int num_nodes() const { return static_cast<int>(nodes.cols()); }
  int num_triangles() const { return static_cast<int>(triangles.cols()); }
  int num_boundary_edges() const { return static_cast<int>(boundary_edges.cols()); }
  Vec2 node(int i) const { return nodes.col(i); }
};

Mesh generate_mesh(const Rectd& R, const std::optional<Body>& body, const MeshOptions& opt);

inline Mesh generate_mesh(const Rectd& R, const std::optional<Body>& body, double h) {
  MeshOptions opt;
  opt.h = h;
  return generate_mesh(R, body, opt);
}

/// x2 -> -x2 with reoriented triangles and top/bottom tags swapped.
Mesh reflect_mesh(const Mesh& M);

struct MeshQuality {
  double min_angle_deg = 0;
  /// Circumradius over twice the inradius; 1 for an equilateral triangle.
  double max_aspect_ratio = 0;
  double h_min = 0;
  double h_max = 0;
  int nodes = 0;
  int triangles = 0;
  int edges = 0;
  std::array<int, kNumBoundaryTags> boundary_edges_per_tag{};
};

MeshQuality mesh_quality(const Mesh& M);

/// Orientation, boundary/tag consistency and body exclusion.
Report validate_mesh(const Mesh& M);

double signed_area(const Mesh& M, int t);
double boundary_length(const Mesh& M, BoundaryTag tag);

/// Moves the body nodes with `boundary_map`, extends the displacement to the
/// interior by a discrete harmonic extension and stores `target` as the body.
/// Throws Error if an element inverts.
Mesh morph_mesh(const Mesh& M, const Body& target, const std::function<Vec2(const Vec2&)>& boundary_map);

/// Radial projection of the body nodes from the current body centroid onto
/// the target boundary. The centroid must lie inside the target.
Mesh morph_mesh(const Mesh& M, const Body& target);

/// Boundary map for morph_mesh: the arc of `from` between consecutive anchors
/// goes onto the arc of `to` between the matching anchors, proportionally to
/// arc length. Anchors are listed counterclockwise; throws InvalidArgument
/// if an anchor is off its boundary or an arc has zero length.
std::function<Vec2(const Vec2&)> anchored_boundary_map(const Body& from, const Body& to,
                                                      const std::vector<Vec2>& from_anchors,
                                                      const std::vector<Vec2>& to_anchors);

/// 64-bit FNV-1a hash of coordinates, connectivity and tags.
std::uint64_t fingerprint(const Mesh& M);

}  // namespace liftlab

#endif  // LIFTLAB_MESH_HPP
