#ifndef LIFTLAB_IO_HPP
#define LIFTLAB_IO_HPP

// JSON/CSV serialization of bodies, profiles, meshes, fields and results, and
// the append-only JSON-lines store.

#include "liftlab/flowshape.hpp"
#include "liftlab/geometry.hpp"
#include "liftlab/lift.hpp"
#include "liftlab/mesh.hpp"
#include "liftlab/ns_solver.hpp"
#include "liftlab/stability.hpp"

#include <json.hpp>

#include <string>

namespace liftlab {

using Json = nlohmann::ordered_json;

Json to_json(const Body& b);
Body body_from_json(const Json& j);

Json to_json(const Trapezium& p);
Trapezium trapezium_from_json(const Json& j);

/// {H, nodes[, exact]}.
Json to_json(const FlowProfile& v);
FlowProfile profile_from_json(const Json& j);

Json to_json(const FlowShapePair& p);
FlowShapePair pair_from_json(const Json& j);

/// {R, h, mirror_symmetric, body, nodes, triangles, boundary: [{edge, tag}]}.
Json to_json(const Mesh& M);
Mesh mesh_from_json(const Json& j);

/// {mesh_ref, lambda, residual, velocity (P2 nodes), pressure (vertices)}.
Json to_json(const FlowField& F);

Json to_json(const SolverStats& s);
Json to_json(const LiftCurve& c);
/// lambda,lift,residual with a header line.
std::string to_csv(const LiftCurve& c);
/// Parses the CSV written by to_csv.
LiftCurve lift_curve_from_csv(const std::string& text);

Json to_json(const ZeroLiftResult& r);
Json to_json(const GammaEstimate& g);
Json to_json(const ShapeOptResult& r);
Json to_json(const ProbeTable& t);
Json to_json(const LambdaEstimate& e);

std::string hex_id(std::uint64_t h);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Appends one JSON document as a single line with one write(2) on an
/// O_APPEND descriptor, so concurrent appenders never interleave.
void append_jsonl(const std::string& path, const Json& record);

}  // namespace liftlab

#endif  // LIFTLAB_IO_HPP
