#pragma once

#include <stdexcept>
#include <string>

namespace ifsdim {

// CLI exit codes; library exceptions map onto them 1:1 in tools/ifsdim_main.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  size_cap = 3,
  numeric = 4,
  validation = 5,
};

// Bad user input: unknown keys, out-of-range parameters, unsupported kind.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A request exceeded one of the documented enumeration/depth caps.  The
// message names the cap so callers can pick a cheaper method.
struct SizeCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric routine failed to converge or produced a non-finite value.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed (monotonicity, conservation, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ifsdim
