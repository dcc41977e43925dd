#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifsdim {

// One release-gate criterion: a named property of the library checked at a
// fixed tolerance, timed, with a short evidence string either way.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string detail;
};

// Runs the full release gate in order and reports one line per criterion to
// `progress` as it completes.  A criterion that throws is reported as a
// failure with the exception text; the gate always runs to the end.
// `golden_dir` holds the frozen reference values (independent oracles).
std::vector<CriterionResult> run_acceptance(const std::string& golden_dir,
                                            std::ostream& progress);

}  // namespace ifsdim
