// liftlab: mesh, solve, lift curves, zero-lift search, gamma and shape
// optimization from one JSON config. Every run appends a record to the store.

#include "liftlab/acceptance.hpp"
#include "liftlab/config.hpp"
#include "liftlab/io.hpp"
#include "liftlab/svg.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

using namespace liftlab;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kAcceptance = 4 };

struct Run {
  std::string command;
  Config cfg;
  Json fingerprints = Json::object();
  Json outputs = Json::array();
  Json stats = Json::object();

  std::string out(const std::string& name) {
    fs::create_directories(cfg.output_dir());
    const std::string p = (fs::path(cfg.output_dir()) / name).string();
    outputs.push_back(p);
    return p;
  }
};

std::string run_id() {
  std::random_device rd;
  const auto now = std::chrono::system_clock::now().time_since_epoch().count();
  return hex_id(static_cast<std::uint64_t>(now) ^ (static_cast<std::uint64_t>(rd()) << 32) ^
                static_cast<std::uint64_t>(::getpid()));
}

Body require_body(const Config& c) {
  auto b = c.body();
  if (!b) throw InvalidArgument("this command needs a body (geometry.body is none)");
  return *b;
}

Mesh make_mesh(Run& r) {
  Mesh M = generate_mesh(r.cfg.channel(), r.cfg.body(), r.cfg.mesh_options());
  r.fingerprints["mesh"] = hex_id(fingerprint(M));
  if (M.body) r.fingerprints["shape"] = to_json(*M.body);
  return M;
}

void cmd_mesh(Run& r) {
  const Mesh M = make_mesh(r);
  const MeshQuality q = mesh_quality(M);
  write_text_file(r.out("mesh.json"), to_json(M).dump() + "\n");
  write_text_file(r.out("mesh.svg"), svg::mesh(M));
  r.stats = {{"nodes", q.nodes}, {"triangles", q.triangles}, {"min_angle_deg", q.min_angle_deg},
             {"h_min", q.h_min}, {"h_max", q.h_max}};
  std::cout << r.stats.dump(2) << "\n";
}

void cmd_solve(Run& r) {
  const Mesh M = make_mesh(r);
  const FlowShapePair P = r.cfg.flow_pair();
  r.fingerprints["flow"] = flow_fingerprint(P);
  const FlowField F = solve_steady_ns(M, {r.cfg.lambda(), P}, r.cfg.solver());
  write_text_file(r.out("field.json"), to_json(F).dump() + "\n");
  r.stats = to_json(F.stats);
  Json res = {{"lambda", F.lambda}, {"residual", F.residual}, {"dirichlet_energy", dirichlet_energy(F)}};
  if (M.body) {
    res["lift_volume"] = lift_volume(F);
    res["lift_boundary"] = lift_boundary(F);
    res["drag_volume"] = drag_volume(F);
  }
  std::cout << res.dump(2) << "\n";
}

void cmd_lift_curve(Run& r) {
  const Mesh M = make_mesh(r);
  const FlowShapePair P = r.cfg.flow_pair();
  r.fingerprints["flow"] = flow_fingerprint(P);
  LiftCurveOptions o;
  o.warm_start = r.cfg.resolved()["lift"]["warm_start"].get<bool>();
  o.threads = r.cfg.threads();
  const LiftCurve c = lift_curve(M, P, r.cfg.lambda_grid(), r.cfg.solver(), o);
  write_text_file(r.out("lift_curve.csv"), to_csv(c));
  write_text_file(r.out("lift_curve.svg"), svg::line_chart({{"lift", c.lambdas, c.lifts}}, "lift curve", "lambda", "lift"));
  std::cout << to_json(c).dump(2) << "\n";
  if (c.truncated) throw SolverDivergence("lift curve truncated: " + c.failure);
}

HomotopyPath make_path(const Config& c) {
  const std::string kind = c.resolved()["zero_lift"]["path"].get<std::string>();
  const std::string body = c.resolved()["geometry"]["body"].get<std::string>();
  if (body != "trapezium") {
    if (kind != "flow") throw InvalidArgument("zero_lift.path " + kind + " needs geometry.body = trapezium");
    return fixed_body_path(c.channel(), require_body(c), c.flow_pair(), c.flow_class(), c.lambda(), c.mesh_options());
  }
  HomotopyPath p = trapezium_path(c.channel(), c.trapezium(), c.flow_pair(), c.flow_class(), c.lambda(), c.mesh_options());
  if (kind == "body") p.delta = [](double) { return 0.0; };
  if (kind == "flow") p.eps = [](double) { return 0.0; };
  return p;
}

void cmd_zero_lift(Run& r) {
  const HomotopyPath path = make_path(r.cfg);
  r.fingerprints["flow"] = flow_fingerprint(r.cfg.flow_pair());
  r.fingerprints["mesh"] = hex_id(fingerprint(*path.reference));
  const ZeroLiftResult z = zero_lift_search(path, r.cfg.solver(), r.cfg.zero_lift());
  write_text_file(r.out("zero_lift.json"), to_json(z).dump(2) + "\n");
  r.fingerprints["shape"] = to_json(path.body(z.t));
  r.stats = {{"solves", z.solves}};
  std::cout << to_json(z).dump(2) << "\n";
}

void cmd_gamma(Run& r) {
  const Body B = require_body(r.cfg);
  r.fingerprints["shape"] = to_json(B);
  const GammaEstimate g = gamma_estimate(B, r.cfg.flow_class(), r.cfg.lambda_max(), r.cfg.solver(), r.cfg.gamma());
  r.fingerprints["mesh"] = g.mesh_id;
  r.fingerprints["flow"] = g.parameterization_id;
  write_text_file(r.out("gamma.json"), to_json(g).dump(2) + "\n");
  r.stats = {{"solves", g.solves}};
  std::cout << "gamma >= " << g.value << " at lambda " << g.argmax_lambda << " (" << g.solves << " solves)\n";
}

void cmd_optimize(Run& r) {
  ShapeOptOptions o = r.cfg.optimize();
  o.initial = r.cfg.body();
  const BodyClassd bc = r.cfg.body_class();
  const ShapeOptResult s = optimize_body(bc, r.cfg.flow_class(), r.cfg.lambda_max(), r.cfg.solver(), o);
  r.fingerprints["shape"] = to_json(s.best);
  write_text_file(r.out("optimize.json"), to_json(s).dump(2) + "\n");
  write_text_file(r.out("optimize.svg"), svg::shapes(r.cfg.channel(), {s.best}, bc.D));
  std::cout << "best gamma " << s.gamma << " over " << s.history.size() << " evaluations\n";
}

int cmd_validate(Run& r, const std::string& suite, const std::vector<int>& only) {
  std::ostringstream log;
  const SuiteOutcome s = run_acceptance(log, suite == "trivial", only);
  std::cout << log.str() << s.passed << " passed, " << s.failed << " failed\n";
  r.stats = {{"suite", suite}, {"passed", s.passed}, {"failed", s.failed}, {"log", log.str()}};
  return s.ok() ? kOk : kAcceptance;
}

void cmd_plot(Run& r, const std::string& input) {
  const std::string text = read_text_file(input);
  const std::string stem = fs::path(input).stem().string();
  std::string svg_text;
  if (fs::path(input).extension() == ".csv") {
    const LiftCurve c = lift_curve_from_csv(text);
    svg_text = svg::line_chart({{"lift", c.lambdas, c.lifts}}, "lift curve", "lambda", "lift");
  } else {
    const Json j = Json::parse(text);
    if (j.contains("triangles"))
      svg_text = svg::mesh(mesh_from_json(j));
    else if (j.contains("best"))
      svg_text = svg::shapes(r.cfg.channel(), {body_from_json(j.at("best"))}, r.cfg.body_class().D);
    else if (j.contains("v_in"))
      svg_text = svg::profiles(pair_from_json(j), stem);
    else if (j.contains("vertices"))
      svg_text = svg::shapes(r.cfg.channel(), {body_from_json(j)});
    else if (j.contains("argmax_pair") && !j.at("argmax_pair").is_null())
      svg_text = svg::profiles(pair_from_json(j.at("argmax_pair")), "gamma maximizer");
    else if (j.contains("trace") && j.contains("widths")) {
      svg::Series s{"lift", {}, {}};
      for (const auto& e : j.at("trace")) s.x.push_back(e.at("t")), s.y.push_back(e.at("lift"));
      svg_text = svg::line_chart({s}, "zero-lift search", "t", "lift");
    } else
      throw InvalidArgument("plot: unrecognized document " + input);
  }
  write_text_file(r.out(stem + ".svg"), svg_text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"liftlab: lift on obstacles in channel flow"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path, output_dir, store;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "JSON config file");
  app.add_option("-o,--output-dir", output_dir, "Directory for artifacts (overrides output.dir)");
  app.add_option("--store", store, "JSON-lines run store (overrides LIFTLAB_STORE and output.store)");
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");

  std::string suite = "full", plot_input;
  std::vector<int> only;
  auto* sub_mesh = app.add_subcommand("mesh", "Generate and export the mesh");
  auto* sub_solve = app.add_subcommand("solve", "Solve at lift.lambda and export the field");
  auto* sub_curve = app.add_subcommand("lift-curve", "Lift over the lambda grid (CSV + SVG)");
  auto* sub_zero = app.add_subcommand("zero-lift", "Bisection for a zero-lift configuration");
  auto* sub_gamma = app.add_subcommand("gamma", "Lower bound of the instability measure");
  auto* sub_opt = app.add_subcommand("optimize", "Minimize gamma over convex bodies");
  auto* sub_val = app.add_subcommand("validate", "Run the acceptance suite");
  sub_val->add_option("--suite", suite, "trivial or full")->check(CLI::IsMember({"trivial", "full"}));
  sub_val->add_option("--only", only, "Criterion ids to run");
  auto* sub_plot = app.add_subcommand("plot", "Re-render an SVG from a stored CSV or JSON");
  sub_plot->add_option("input", plot_input, "CSV or JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Run r;
  try {
    Json user = config_path.empty() ? Json::object() : Json::parse(read_text_file(config_path));
    if (!output_dir.empty()) user["output"]["dir"] = output_dir;
    if (const char* env = std::getenv("LIFTLAB_STORE"); env && *env) user["output"]["store"] = env;
    if (!store.empty()) user["output"]["store"] = store;
    if (const char* env = std::getenv("LIFTLAB_THREADS"); env && *env) user["threads"] = std::stoi(env);
    r.cfg = Config::parse(user);
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) std::cerr << "config: " << p << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kConfig;
  }
  if (print_config) {
    std::cout << r.cfg.resolved().dump(2) << "\n";
    return kOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kConfig;
  }

  int code = kOk;
  const CLI::App* sub = app.get_subcommands().front();
  r.command = sub->get_name();
  try {
    if (sub == sub_mesh) cmd_mesh(r);
    else if (sub == sub_solve) cmd_solve(r);
    else if (sub == sub_curve) cmd_lift_curve(r);
    else if (sub == sub_zero) cmd_zero_lift(r);
    else if (sub == sub_gamma) cmd_gamma(r);
    else if (sub == sub_opt) cmd_optimize(r);
    else if (sub == sub_val) code = cmd_validate(r, suite, only);
    else if (sub == sub_plot) cmd_plot(r, plot_input);
  } catch (const InvalidArgument& e) {
    std::cerr << r.command << ": " << e.what() << "\n";
    code = kConfig;
  } catch (const std::exception& e) {
    std::cerr << r.command << ": " << e.what() << "\n";
    code = kNumerical;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json rec = {{"run_id", run_id()},
              {"command", r.command},
              {"config", r.cfg.resolved()},
              {"fingerprints", r.fingerprints},
              {"outputs", r.outputs},
              {"wall_time", wall},
              {"solver_stats", r.stats},
              {"exit_code", code}};
  try {
    append_jsonl(r.cfg.store_path(), rec);
  } catch (const std::exception& e) {
    std::cerr << "store: " << e.what() << "\n";
    if (code == kOk) code = kNumerical;
  }
  return code;
}
