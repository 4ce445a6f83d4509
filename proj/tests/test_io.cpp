#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liftlab/config.hpp"
#include "liftlab/io.hpp"
#include "liftlab/svg.hpp"

#include <unistd.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

using namespace liftlab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / (name + "_" + std::to_string(::getpid()))).string();
}

}  // namespace

TEST_CASE("defaults parse and round trip") {
  const Config c = Config::parse(Json::object());
  CHECK(c.resolved() == Config::defaults());
  CHECK(Config::parse(c.resolved()).resolved() == c.resolved());
  CHECK(c.body().has_value());
  CHECK(c.channel().half_width == 5.0);
}

TEST_CASE("overrides round trip through the resolved document") {
  const Json user = Json::parse(R"({"mesh": {"h": 0.1, "mirror": true}, "geometry": {"body": "rectangle"},
                                    "flow": {"odd_in": 0.1}, "solver": {"convection": "skew"}, "threads": 3})");
  const Config c = Config::parse(user);
  const Config again = Config::parse(Json::parse(c.resolved().dump()));
  CHECK(again.resolved() == c.resolved());
  CHECK(c.mesh_options().mirror);
  CHECK(c.solver().convection == ConvectionForm::Skew);
  CHECK(c.threads() == 3);
  CHECK(is_admissible_flow(c.flow_pair(), c.flow_class()).ok());
}

TEST_CASE("config errors name every offending key") {
  const Json user = Json::parse(R"({"mesh": {"hh": 1, "h": "fine"}, "bogus": 1, "threads": 1.5})");
  try {
    Config::parse(user);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 4);
  }
  try {
    Config::parse(Json::parse(R"({"mesh": {"h": -1}, "lift": {"lambda_max": 0.0}, "flow": {"U": 3}})"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 3);
  }
}

TEST_CASE("body, profile, pair and mesh JSON round trips") {
  const Body b = body_family(0.3, Trapezium{0.6, 0.15, 0.3});
  CHECK(body_from_json(Json::parse(to_json(b).dump())) == b);
  const FlowShapePair p{poiseuille(1), renormalize_flux(couette(1).sampled()), 0};
  const FlowShapePair q = pair_from_json(Json::parse(to_json(p).dump()));
  CHECK(q.v_in.nodes() == p.v_in.nodes());
  CHECK(q.v_in.exact().has_value());
  CHECK(q.v_out.nodes() == p.v_out.nodes());
  const Mesh M = generate_mesh(Rectd{5, 1}, b, 0.3);
  CHECK(fingerprint(mesh_from_json(Json::parse(to_json(M).dump()))) == fingerprint(M));
}

TEST_CASE("lift curve CSV round trips exactly") {
  LiftCurve c;
  c.lambdas = {0, 0.1, 1.0 / 3};
  c.lifts = {0, -1.234567890123456789e-3, 2.0 / 7};
  c.residuals = {0, 1e-12, 3e-11};
  const LiftCurve d = lift_curve_from_csv(to_csv(c));
  CHECK(d.lambdas == c.lambdas);
  CHECK(d.lifts == c.lifts);
  CHECK(d.residuals == c.residuals);
  CHECK_THROWS_AS(lift_curve_from_csv("x,y\n"), InvalidArgument);
}

TEST_CASE("concurrent store appends never interleave") {
  const std::string path = temp_path("liftlab_store.jsonl");
  std::filesystem::remove(path);
  constexpr int kThreads = 8, kEach = 100;
  std::vector<std::thread> ts;
  const std::string pad(3000, 'x');
  for (int t = 0; t < kThreads; ++t)
    ts.emplace_back([&, t] {
      for (int i = 0; i < kEach; ++i) append_jsonl(path, {{"run_id", t * 1000 + i}, {"pad", pad}});
    });
  for (auto& t : ts) t.join();
  std::istringstream in(read_text_file(path));
  std::set<int> ids;
  std::string line;
  while (std::getline(in, line)) {
    const Json j = Json::parse(line);
    CHECK(j.at("pad") == pad);
    ids.insert(j.at("run_id").get<int>());
  }
  CHECK(ids.size() == kThreads * kEach);
  std::filesystem::remove(path);
}

TEST_CASE("svg writers emit closed documents") {
  const Rectd R{5, 1};
  for (const std::string& s : {svg::line_chart({{"a", {0, 1, 2}, {0, 1, 0}}}, "t", "x", "y"),
                               svg::shapes(R, {trapezium(Trapezium{0.6, 0.15, 0.3})}, Rectd{2, 0.5}),
                               svg::mesh(generate_mesh(R, std::nullopt, 0.5)),
                               svg::profiles({poiseuille(1), couette(1), 1}, "p <&>")}) {
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("<&>") == std::string::npos);
  }
}
