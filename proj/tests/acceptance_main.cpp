// Prints one PASS/FAIL line per acceptance criterion. Arguments: criterion
// ids to run (default all), or --quick for the fast subset.
#include "liftlab/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  bool quick = false;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick")
      quick = true;
    else
      ids.push_back(std::atoi(a.c_str()));
  }
  const auto s = liftlab::run_acceptance(std::cout, quick, ids);
  std::cout << s.passed << " passed, " << s.failed << " failed" << std::endl;
  return s.ok() ? 0 : 1;
}
