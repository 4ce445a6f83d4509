#ifndef LIFTLAB_CONFIG_HPP
#define LIFTLAB_CONFIG_HPP

// Run configuration: a JSON document checked against the defaults (every key
// must exist there with the same type) and then range-checked.

#include "liftlab/io.hpp"
#include "liftlab/ns_solver.hpp"
#include "liftlab/stability.hpp"

#include <optional>
#include <string>
#include <vector>

namespace liftlab {

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class Config {
 public:
  static const Json& defaults();
  /// Overlays `user` on the defaults. Throws ConfigError naming every bad key.
  static Config parse(const Json& user);
  static Config load(const std::string& path);

  /// The fully resolved document; parse(resolved()) reproduces it.
  const Json& resolved() const { return doc_; }

  Rectd channel() const;
  /// The body named by geometry.body: trapezium, rectangle, custom or none.
  std::optional<Body> body() const;
  Trapezium trapezium() const;
  BodyClassd body_class() const;
  MeshOptions mesh_options() const;
  SolverConfig solver() const;
  FlowClassParams flow_class() const;
  /// Poiseuille (U = 0) or Couette-type base plus the configured odd parts,
  /// or the explicit flow.pair document.
  FlowShapePair flow_pair() const;
  double lambda() const;
  double lambda_max() const;
  std::vector<double> lambda_grid() const;
  ZeroLiftOptions zero_lift() const;
  GammaOptions gamma() const;
  ShapeOptOptions optimize() const;
  int threads() const;
  std::string output_dir() const;
  std::string store_path() const;

 private:
  Json doc_;
};

}  // namespace liftlab

#endif  // LIFTLAB_CONFIG_HPP
