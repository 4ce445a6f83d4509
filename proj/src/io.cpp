#include "liftlab/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace liftlab {

namespace {

Json vec(const Vec2& p) { return Json::array({p.x(), p.y()}); }

Vec2 vec2(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("expected a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix2x(const Eigen::Matrix2Xd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.cols(); ++i) a.push_back(vec(m.col(i)));
  return a;
}

}  // namespace

std::string hex_id(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const Body& b) {
  Json a = Json::array();
  for (const auto& v : b.vertices()) a.push_back(vec(v));
  return {{"vertices", a}};
}

Body body_from_json(const Json& j) {
  const Json& a = j.is_object() ? j.at("vertices") : j;
  std::vector<Vec2> pts;
  for (const auto& p : a) pts.push_back(vec2(p));
  return Body(std::move(pts));
}

Json to_json(const Trapezium& p) { return {{"l", p.l}, {"h", p.h}, {"gamma", p.gamma}}; }

Trapezium trapezium_from_json(const Json& j) {
  return {j.at("l").get<double>(), j.at("h").get<double>(), j.at("gamma").get<double>()};
}

Json to_json(const FlowProfile& v) {
  Json j = {{"H", v.H()}, {"nodes", std::vector<double>(v.nodes().data(), v.nodes().data() + v.size())}};
  if (v.exact()) j["exact"] = {(*v.exact())(0), (*v.exact())(1), (*v.exact())(2)};
  return j;
}

FlowProfile profile_from_json(const Json& j) {
  const auto nodes = j.at("nodes").get<std::vector<double>>();
  VecX n = Eigen::Map<const VecX>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
  std::optional<Eigen::Vector3d> exact;
  if (j.contains("exact")) {
    const auto c = j.at("exact").get<std::vector<double>>();
    if (c.size() != 3) throw InvalidArgument("profile: exact needs 3 coefficients");
    exact = Eigen::Vector3d(c[0], c[1], c[2]);
  }
  return FlowProfile(j.at("H").get<double>(), n, exact);
}

Json to_json(const FlowShapePair& p) { return {{"U", p.U}, {"v_in", to_json(p.v_in)}, {"v_out", to_json(p.v_out)}}; }

FlowShapePair pair_from_json(const Json& j) {
  return {profile_from_json(j.at("v_in")), profile_from_json(j.at("v_out")), j.value("U", 0)};
}

Json to_json(const Mesh& M) {
  Json j;
  j["R"] = {{"L", M.R.half_width}, {"H", M.R.half_height}};
  j["h"] = M.h;
  j["mirror_symmetric"] = M.mirror_symmetric;
  j["body"] = M.body ? to_json(*M.body) : Json(nullptr);
  j["nodes"] = matrix2x(M.nodes);
  Json tris = Json::array();
  for (int t = 0; t < M.num_triangles(); ++t)
    tris.push_back({M.triangles(0, t), M.triangles(1, t), M.triangles(2, t)});
  j["triangles"] = tris;
  Json bnd = Json::array();
  for (int e = 0; e < M.num_boundary_edges(); ++e)
    bnd.push_back({{"edge", {M.boundary_edges(0, e), M.boundary_edges(1, e)}},
                   {"tag", std::string(to_string(M.boundary_tags[e]))}});
  j["boundary"] = bnd;
  return j;
}

Mesh mesh_from_json(const Json& j) {
  Mesh M;
  M.R = {j.at("R").at("L").get<double>(), j.at("R").at("H").get<double>()};
  M.h = j.at("h").get<double>();
  M.mirror_symmetric = j.value("mirror_symmetric", false);
  if (!j.at("body").is_null()) M.body = body_from_json(j.at("body"));
  const Json& n = j.at("nodes");
  M.nodes.resize(2, static_cast<Eigen::Index>(n.size()));
  for (std::size_t i = 0; i < n.size(); ++i) M.nodes.col(static_cast<Eigen::Index>(i)) = vec2(n[i]);
  const Json& t = j.at("triangles");
  M.triangles.resize(3, static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (int k = 0; k < 3; ++k) M.triangles(k, static_cast<Eigen::Index>(i)) = t[i].at(k).get<int>();
  const Json& b = j.at("boundary");
  M.boundary_edges.resize(2, static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (int k = 0; k < 2; ++k) M.boundary_edges(k, static_cast<Eigen::Index>(i)) = b[i].at("edge").at(k).get<int>();
    M.boundary_tags.push_back(boundary_tag_from_string(b[i].at("tag").get<std::string>()));
  }
  return M;
}

Json to_json(const FlowField& F) {
  Json j;
  j["mesh_ref"] = hex_id(fingerprint(F.mesh()));
  j["lambda"] = F.lambda;
  j["residual"] = F.residual;
  j["convection"] = F.convection == ConvectionForm::Skew ? "skew" : "standard";
  j["velocity"] = matrix2x(F.velocity);
  j["pressure"] = std::vector<double>(F.pressure.data(), F.pressure.data() + F.pressure.size());
  return j;
}

Json to_json(const SolverStats& s) {
  return {{"continuation_steps", s.continuation_steps},
          {"newton_iterations", s.newton_iterations},
          {"picard_iterations", s.picard_iterations},
          {"step_halvings", s.step_halvings},
          {"residual_history", s.residual_history}};
}

Json to_json(const LiftCurve& c) {
  Json j = {{"mesh_id", c.mesh_id}, {"flow_id", c.flow_id}, {"lambda", c.lambdas},
            {"lift", c.lifts},      {"residual", c.residuals}, {"sup_norm", c.sup_norm()},
            {"truncated", c.truncated}};
  if (c.truncated) j["failure"] = c.failure;
  return j;
}

std::string to_csv(const LiftCurve& c) {
  std::string out = "lambda,lift,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c.lambdas[i], c.lifts[i], c.residuals[i]);
    out += buf;
  }
  return out;
}

LiftCurve lift_curve_from_csv(const std::string& text) {
  LiftCurve c;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("lambda,lift", 0) != 0) throw InvalidArgument("lift curve CSV: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double l, f, r = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &l, &f, &r) < 2) throw InvalidArgument("lift curve CSV: bad row");
    c.lambdas.push_back(l);
    c.lifts.push_back(f);
    c.residuals.push_back(r);
  }
  return c;
}

Json to_json(const ZeroLiftResult& r) {
  Json trace = Json::array();
  for (auto [t, l] : r.trace) trace.push_back({{"t", t}, {"lift", l}});
  return {{"t", r.t},          {"eps", r.eps},           {"delta", r.delta},
          {"lift", r.lift},    {"verified_lift", r.verified_lift}, {"lift_tol", r.lift_tol},
          {"noise_floor", r.noise_floor}, {"scale", r.scale}, {"solves", r.solves},
          {"widths", r.widths}, {"trace", trace}};
}

Json to_json(const GammaEstimate& g) {
  Json trace = Json::array();
  for (const auto& e : g.trace)
    trace.push_back({{"evaluation", e.evaluation},
                     {"flow_id", e.flow_id},
                     {"sup", e.sup},
                     {"argmax_lambda", e.argmax_lambda},
                     {"seconds", e.seconds}});
  Json j = {{"value", g.value},
            {"lower_bound", true},
            {"argmax_lambda", g.argmax_lambda},
            {"mesh_id", g.mesh_id},
            {"parameterization", g.parameterization_id},
            {"solves", g.solves}};
  j["argmax_coefficients"] = std::vector<double>(g.argmax_coefficients.data(),
                                                 g.argmax_coefficients.data() + g.argmax_coefficients.size());
  j["argmax_pair"] = g.argmax_pair ? to_json(*g.argmax_pair) : Json(nullptr);
  j["trace"] = trace;
  return j;
}

Json to_json(const ShapeOptResult& r) {
  Json hist = Json::array();
  for (const auto& it : r.history)
    hist.push_back({{"body", to_json(it.body)},
                    {"gamma", it.gamma},
                    {"best_so_far", it.best_so_far},
                    {"admissible", it.admissible.ok()}});
  return {{"best", to_json(r.best)},
          {"gamma", r.gamma},
          {"feasible", r.feasibility.ok()},
          {"violations", r.feasibility.violations},
          {"history", hist}};
}

Json to_json(const ProbeTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = {{"size", r.size}, {"lift", r.lift}, {"difference", r.difference}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  return {{"base_lift", t.base_lift}, {"monotone", t.monotone}, {"passed", t.passed}, {"rows", rows}};
}

Json to_json(const LambdaEstimate& e) {
  Json probes = Json::array();
  for (auto [l, ok] : e.probes) probes.push_back({{"lambda", l}, {"accepted", ok}});
  return {{"lambda", e.lambda}, {"limit", to_string(e.limit)}, {"s0", e.s0}, {"probes", probes}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

void append_jsonl(const std::string& path, const Json& record) {
  const std::string line = record.dump() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot open store " + path + ": " + std::strerror(errno));
  const ssize_t n = ::write(fd, line.data(), line.size());
  const int err = errno;
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size())) throw Error("short write to store " + path + ": " + std::strerror(err));
}

}  // namespace liftlab
