#ifndef LIFTLAB_SVG_HPP
#define LIFTLAB_SVG_HPP

// Minimal SVG writers: polyline charts, body outlines and mesh wireframes.

#include "liftlab/flowshape.hpp"
#include "liftlab/geometry.hpp"
#include "liftlab/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace liftlab::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel);

/// Bodies drawn inside the channel rectangle, D dashed when given.
std::string shapes(const Rectd& R, const std::vector<Body>& bodies, const std::optional<Rectd>& D = std::nullopt);

std::string mesh(const Mesh& M);

/// V_in and V_out over [-H, H].
std::string profiles(const FlowShapePair& p, const std::string& title);

}  // namespace liftlab::svg

#endif  // LIFTLAB_SVG_HPP
