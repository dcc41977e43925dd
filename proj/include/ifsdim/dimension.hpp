#pragma once

#include <cstdint>
#include <vector>

#include "ifsdim/ifs.hpp"
#include "ifsdim/pressure.hpp"
#include "ifsdim/target.hpp"

namespace ifsdim {

// Critical exponent s0 = inf{ s : P(s) <= A(s) log B }.  P is strictly
// decreasing and A(s) log B is increasing in s, so g(s) = P(s) - A(s) log B
// has a unique sign change; s0 is bisected to the requested tolerance.
struct DimensionResult {
  double s0 = 0;
  double lo = 0, hi = 0;  // final bisection bracket, hi - lo <= tol
  PressureMethod method = PressureMethod::exact_partition;
  std::uint64_t M = 0;  // alphabet used (0 = full)
  double B = 0;
  // g(1) > 0 cannot happen for B > 1 on an honest pressure estimate, but a
  // defensive clamp keeps the contract total; clamped_low fires when the
  // threshold is so large that g < 0 all the way down to the search floor
  // 1/d + 1e-6 (the finite-alphabet pressure stays bounded there).
  bool clamped_high = false;
  bool clamped_low = false;
  double pressure_halfwidth = 0;  // worst half-width of the P brackets seen
};

// Bisection with tol in [1e-10, 1e-2]; at most 60 halvings.  The pressure
// backend is chosen as in pressure_auto.
DimensionResult critical_exponent(const SystemSpec& sys, const TargetSpec& target, double tol);

// Re-solves per threshold base; B_grid must be strictly increasing, all > 1.
// Throws ValidationError if the exponents fail to decrease beyond the
// combined bracket noise (clamped entries are exempt).
std::vector<DimensionResult> critical_exponent_sweep(const SystemSpec& sys,
                                                     const TargetSpec& target,
                                                     const std::vector<double>& B_grid,
                                                     double tol);

// Convergence of the truncated exponents s0(M) and the finite-level
// exponents s0_n toward the reference value for `sys` itself.
struct ConvergenceEntry {
  std::uint64_t param = 0;  // M or n
  DimensionResult result;
  double diff_to_final = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceEntry> by_M;
  std::vector<ConvergenceEntry> by_n;
  DimensionResult final;
};

// s0(M) uses the standard backend on the M-truncated system; s0_n roots the
// fixed-level pressure (1/n) log Z_n via batched multi-point bisection so
// one digit-tree walk serves several s values per round.
ConvergenceTable convergence_diagnostics(const SystemSpec& sys, const TargetSpec& target,
                                         const std::vector<std::uint64_t>& M_list,
                                         const std::vector<std::uint32_t>& n_list,
                                         double tol = 1e-8);

}  // namespace ifsdim
