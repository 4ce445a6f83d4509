#ifndef LIFTLAB_COMMON_HPP
#define LIFTLAB_COMMON_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace liftlab {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition or malformed data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Newton/Picard iteration failed after exhausting continuation.
class SolverDivergence : public Error {
 public:
  using Error::Error;
};

/// Linear system could not be factorized.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Named list of failed checks; empty means the checked object is admissible.
struct Report {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
};

}  // namespace liftlab

#endif  // LIFTLAB_COMMON_HPP
