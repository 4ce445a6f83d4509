#ifndef LIFTLAB_DELAUNAY_HPP
#define LIFTLAB_DELAUNAY_HPP

#include "liftlab/common.hpp"

#include <array>
#include <functional>
#include <vector>

namespace liftlab::detail {

/// Planar straight-line graph. Segments must not cross or overlap.
struct Pslg {
  std::vector<Vec2> points;
  std::vector<std::array<int, 2>> segments;
  std::vector<int> markers;
};

struct RefineOptions {
  std::function<double(const Vec2&)> size;
  double min_angle_deg = 20.5;
  int max_points = 500000;
};

struct Triangulation {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> segments;
  std::vector<int> markers;
};

/// Quality conforming Delaunay triangulation of the region selected by
/// `inside`, which is evaluated once per connected component of the
/// segment-bounded complement. Deterministic for fixed input.
Triangulation triangulate(const Pslg& g, const std::function<bool(const Vec2&)>& inside, const RefineOptions& opt);

}  // namespace liftlab::detail

#endif  // LIFTLAB_DELAUNAY_HPP
