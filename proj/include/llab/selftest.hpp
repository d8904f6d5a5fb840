#pragma once

#include <string>
#include <vector>

namespace llab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks over every module (a few seconds in Release).
std::vector<CheckResult> run_selftest(unsigned workers = 1);

}  // namespace llab
