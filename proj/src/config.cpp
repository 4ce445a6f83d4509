#include "liftlab/config.hpp"

#include <cmath>

namespace liftlab {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += (s.empty() ? "" : "; ") + p;
  return s;
}

const char* kind(const Json& j) {
  if (j.is_null()) return "null";
  if (j.is_boolean()) return "boolean";
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  return "object";
}

// A null default accepts anything (checked when used); floats accept any
// number; integers, booleans, strings and arrays must match exactly.
bool same_type(const Json& def, const Json& v) {
  if (def.is_null()) return true;
  if (def.is_number_float()) return v.is_number();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  return v.is_object();
}

void overlay(Json& out, const Json& def, const Json& user, const std::string& path, std::vector<std::string>& bad) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!def.contains(it.key())) {
      bad.push_back(key + ": unknown key");
      continue;
    }
    const Json& d = def.at(it.key());
    if (!same_type(d, it.value())) {
      bad.push_back(key + ": expected " + std::string(kind(d)) + ", got " + kind(it.value()));
      continue;
    }
    if (d.is_object())
      overlay(out[it.key()], d, it.value(), key, bad);
    else
      out[it.key()] = it.value();
  }
}

template <typename F>
void collect(std::vector<std::string>& bad, const std::string& where, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    bad.push_back(where + ": " + e.what());
  }
}

FlowProfile with_odd(const FlowProfile& base, double a) {
  if (a == 0) return base;
  const double H = base.H();
  return renormalize_flux(base.sampled() + FlowProfile::from_function(H, base.size(), [H, a](double x) {
                            const double s = x / H;
                            return a * (1 - s * s) * s;
                          }));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : InvalidArgument("invalid config: " + join(problems)), problems_(std::move(problems)) {}

const Json& Config::defaults() {
  static const Json d = Json::parse(R"({
  "geometry": {
    "L": 5.0, "H": 1.0,
    "body": "trapezium",
    "trapezium": {"l": 0.6, "h": 0.15, "gamma": 0.3},
    "rectangle": {"half_width": 0.6, "half_height": 0.15},
    "vertices": null,
    "D": {"half_width": 2.0, "half_height": 0.5},
    "alpha": 0.405
  },
  "mesh": {"h": 0.16666666666666666, "body_h": 0.0, "mirror": false, "min_angle_deg": 20.5, "max_nodes": 500000},
  "flow": {"U": 0, "r": 6.0, "odd_in": 0.0, "odd_out": 0.0, "pair": null},
  "solver": {
    "newton_tol": 1e-10, "max_newton_iters": 25, "continuation_steps": 1, "convection": "standard",
    "pivot_tol": 1.0, "max_step_halvings": 8, "picard_fallback_iters": 3
  },
  "lift": {"lambda": 0.5, "lambda_max": 2.0, "grid_points": 17, "warm_start": true},
  "zero_lift": {"path": "diagonal", "max_bisections": 20, "lift_tol": 0.0, "noise_rel": 1e-8},
  "gamma": {
    "m": 6, "budget": 40, "restarts": 2, "seed": 1, "step": 0.5,
    "coarse_points": 17, "refine_passes": 2, "refine_points": 8, "basis_order": []
  },
  "optimize": {
    "vertices": 8, "generations": 4, "population": 4, "sigma": 0.05, "seed": 7,
    "max_projection_iters": 50, "candidates": []
  },
  "output": {"dir": ".", "store": "liftlab_runs.jsonl"},
  "threads": 1
})");
  return d;
}

Config Config::parse(const Json& user) {
  std::vector<std::string> bad;
  Config c;
  c.doc_ = defaults();
  if (!user.is_object() && !user.is_null()) throw ConfigError({"config: top level must be an object"});
  if (user.is_object()) overlay(c.doc_, defaults(), user, "", bad);
  if (!bad.empty()) throw ConfigError(bad);

  const Json& g = c.doc_["geometry"];
  const std::string body = g["body"].get<std::string>();
  if (body != "trapezium" && body != "rectangle" && body != "custom" && body != "none")
    bad.push_back("geometry.body: must be trapezium, rectangle, custom or none");
  if (!(g["L"].get<double>() > 0 && g["H"].get<double>() > 0)) bad.push_back("geometry.L, geometry.H: must be positive");
  if (bad.empty()) {
    collect(bad, "geometry.trapezium", [&] { validate(c.trapezium(), c.channel()); });
    collect(bad, "geometry.D/alpha", [&] { validate(c.body_class(), c.channel()); });
    collect(bad, "geometry.body", [&] {
      if (auto b = c.body(); b && clearance(*b, c.channel()) <= 0) throw InvalidArgument("body must lie inside the channel");
    });
  }
  const Json& m = c.doc_["mesh"];
  if (!(m["h"].get<double>() > 0)) bad.push_back("mesh.h: must be positive");
  if (m["max_nodes"].get<int>() < 3) bad.push_back("mesh.max_nodes: must be at least 3");
  const std::string conv = c.doc_["solver"]["convection"].get<std::string>();
  if (conv != "standard" && conv != "skew") bad.push_back("solver.convection: must be standard or skew");
  else collect(bad, "solver", [&] { validate(c.solver()); });
  const Json& f = c.doc_["flow"];
  if (f["U"].get<int>() != 0 && f["U"].get<int>() != 1) bad.push_back("flow.U: must be 0 or 1");
  else if (bad.empty()) {
    collect(bad, "flow.r", [&] { validate(c.flow_class(), c.channel().half_height); });
    collect(bad, "flow", [&] {
      const FlowShapePair p = c.flow_pair();
      if (p.v_in.H() != c.channel().half_height || p.v_out.H() != c.channel().half_height)
        throw InvalidArgument("profiles must span the channel height");
    });
  }
  const Json& l = c.doc_["lift"];
  if (!(l["lambda"].get<double>() >= 0)) bad.push_back("lift.lambda: must be nonnegative");
  if (!(l["lambda_max"].get<double>() > 0)) bad.push_back("lift.lambda_max: must be positive");
  if (l["grid_points"].get<int>() < 2) bad.push_back("lift.grid_points: must be at least 2");
  const std::string path = c.doc_["zero_lift"]["path"].get<std::string>();
  if (path != "diagonal" && path != "body" && path != "flow")
    bad.push_back("zero_lift.path: must be diagonal, body or flow");
  if (c.doc_["zero_lift"]["max_bisections"].get<int>() < 0) bad.push_back("zero_lift.max_bisections: must be nonnegative");
  const Json& gm = c.doc_["gamma"];
  for (const char* k : {"m", "budget", "restarts", "refine_passes", "refine_points"})
    if (gm[k].get<int>() < 0) bad.push_back(std::string("gamma.") + k + ": must be nonnegative");
  if (gm["coarse_points"].get<int>() < 2) bad.push_back("gamma.coarse_points: must be at least 2");
  if (!gm["basis_order"].empty() && static_cast<int>(gm["basis_order"].size()) != 2 * gm["m"].get<int>())
    bad.push_back("gamma.basis_order: must list 2m indices");
  const Json& o = c.doc_["optimize"];
  if (o["vertices"].get<int>() < 3) bad.push_back("optimize.vertices: must be at least 3");
  if (o["population"].get<int>() < 1) bad.push_back("optimize.population: must be at least 1");
  if (o["generations"].get<int>() < 0) bad.push_back("optimize.generations: must be nonnegative");
  if (!(o["sigma"].get<double>() > 0)) bad.push_back("optimize.sigma: must be positive");
  collect(bad, "optimize.candidates", [&] {
    for (const auto& b : o["candidates"]) body_from_json(b);
  });
  if (c.doc_["threads"].get<int>() < 1) bad.push_back("threads: must be at least 1");
  if (!bad.empty()) throw ConfigError(bad);
  return c;
}

Config Config::load(const std::string& path) {
  Json user;
  try {
    user = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return parse(user);
}

Rectd Config::channel() const { return {doc_["geometry"]["L"].get<double>(), doc_["geometry"]["H"].get<double>()}; }

Trapezium Config::trapezium() const { return trapezium_from_json(doc_["geometry"]["trapezium"]); }

std::optional<Body> Config::body() const {
  const Json& g = doc_["geometry"];
  const std::string kind = g["body"].get<std::string>();
  if (kind == "none") return std::nullopt;
  if (kind == "trapezium") return liftlab::trapezium(trapezium());
  if (kind == "rectangle")
    return centered_rectangle(g["rectangle"]["half_width"].get<double>(), g["rectangle"]["half_height"].get<double>());
  if (g["vertices"].is_null()) throw InvalidArgument("geometry.vertices is required for a custom body");
  return body_from_json(g["vertices"]);
}

BodyClassd Config::body_class() const {
  const Json& g = doc_["geometry"];
  BodyClassd bc;
  bc.D = {g["D"]["half_width"].get<double>(), g["D"]["half_height"].get<double>()};
  bc.alpha = g["alpha"].get<double>();
  return bc;
}

MeshOptions Config::mesh_options() const {
  const Json& m = doc_["mesh"];
  MeshOptions o;
  o.h = m["h"].get<double>();
  o.body_h = m["body_h"].get<double>();
  o.mirror = m["mirror"].get<bool>();
  o.min_angle_deg = m["min_angle_deg"].get<double>();
  o.max_nodes = m["max_nodes"].get<int>();
  return o;
}

SolverConfig Config::solver() const {
  const Json& s = doc_["solver"];
  SolverConfig c;
  c.newton_tol = s["newton_tol"].get<double>();
  c.max_newton_iters = s["max_newton_iters"].get<int>();
  c.continuation_steps = s["continuation_steps"].get<int>();
  c.convection = s["convection"].get<std::string>() == "skew" ? ConvectionForm::Skew : ConvectionForm::Standard;
  c.pivot_tol = s["pivot_tol"].get<double>();
  c.max_step_halvings = s["max_step_halvings"].get<int>();
  c.picard_fallback_iters = s["picard_fallback_iters"].get<int>();
  return c;
}

FlowClassParams Config::flow_class() const {
  return {doc_["flow"]["r"].get<double>(), doc_["flow"]["U"].get<int>()};
}

FlowShapePair Config::flow_pair() const {
  const Json& f = doc_["flow"];
  if (!f["pair"].is_null()) return pair_from_json(f["pair"]);
  const double H = channel().half_height;
  const int U = f["U"].get<int>();
  const FlowProfile base = U == 0 ? poiseuille(H) : couette(H);
  return {with_odd(base, f["odd_in"].get<double>()), with_odd(base, f["odd_out"].get<double>()), U};
}

double Config::lambda() const { return doc_["lift"]["lambda"].get<double>(); }
double Config::lambda_max() const { return doc_["lift"]["lambda_max"].get<double>(); }

std::vector<double> Config::lambda_grid() const {
  const int n = doc_["lift"]["grid_points"].get<int>();
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lambda_max() * i / (n - 1));
  return g;
}

ZeroLiftOptions Config::zero_lift() const {
  const Json& z = doc_["zero_lift"];
  ZeroLiftOptions o;
  o.max_bisections = z["max_bisections"].get<int>();
  o.lift_tol = z["lift_tol"].get<double>();
  o.noise_rel = z["noise_rel"].get<double>();
  return o;
}

GammaOptions Config::gamma() const {
  const Json& g = doc_["gamma"];
  GammaOptions o;
  o.R = channel();
  o.mesh = mesh_options();
  o.m = g["m"].get<int>();
  o.basis_order = g["basis_order"].get<std::vector<int>>();
  o.budget = g["budget"].get<int>();
  o.restarts = g["restarts"].get<int>();
  o.seed = g["seed"].get<std::uint64_t>();
  o.step = g["step"].get<double>();
  o.coarse_points = g["coarse_points"].get<int>();
  o.refine_passes = g["refine_passes"].get<int>();
  o.refine_points = g["refine_points"].get<int>();
  return o;
}

ShapeOptOptions Config::optimize() const {
  const Json& j = doc_["optimize"];
  ShapeOptOptions o;
  o.gamma = gamma();
  o.vertices = j["vertices"].get<int>();
  o.generations = j["generations"].get<int>();
  o.population = j["population"].get<int>();
  o.sigma = j["sigma"].get<double>();
  o.seed = j["seed"].get<std::uint64_t>();
  o.max_projection_iters = j["max_projection_iters"].get<int>();
  o.threads = threads();
  for (const auto& b : j["candidates"]) o.candidates.push_back(body_from_json(b));
  return o;
}

int Config::threads() const { return doc_["threads"].get<int>(); }
std::string Config::output_dir() const { return doc_["output"]["dir"].get<std::string>(); }
std::string Config::store_path() const { return doc_["output"]["store"].get<std::string>(); }

}  // namespace liftlab
