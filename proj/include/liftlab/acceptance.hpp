#ifndef LIFTLAB_ACCEPTANCE_HPP
#define LIFTLAB_ACCEPTANCE_HPP

// The acceptance criteria as runnable checks, shared by the acceptance test
// binary and `liftlab validate`.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace liftlab {

struct CheckResult {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string name;
  /// Part of the quick suite (a few seconds each).
  bool quick = false;
  /// Wall-clock limit in seconds; 0 means none.
  double time_limit = 0;
  std::function<CheckResult()> run;
};

const std::vector<Criterion>& acceptance_criteria();

struct SuiteOutcome {
  int passed = 0;
  int failed = 0;
  bool ok() const { return failed == 0; }
};

/// Runs the selected criteria (all when `ids` is empty, else only those ids;
/// `quick_only` drops the slow ones) and prints one PASS/FAIL line each.
SuiteOutcome run_acceptance(std::ostream& out, bool quick_only, const std::vector<int>& ids = {});

}  // namespace liftlab

#endif  // LIFTLAB_ACCEPTANCE_HPP
