#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifsdim/ifs.hpp"

namespace ifsdim {

enum class PressureMethod { exact_partition, transfer_eigenvalue, tail_extrapolated };

std::string method_name(PressureMethod m);

struct PressureEstimate {
  double s = 0;
  std::uint64_t M = 0;  // alphabet truncation (kFullAlphabet for series values)
  PressureMethod method = PressureMethod::exact_partition;
  double value = 0;
  double lo = 0, hi = 0;  // certified bracket, lo <= value <= hi
  std::size_t n = 0;      // word length (exact-partition only)
};

// Enumeration budget for exact partition sums (number of length-n words).
inline constexpr std::uint64_t kPartitionLeafCap = 1'000'000'000;

// (1/n) log of the sum over all length-n words of |C[w]|^s, with exact
// cylinder lengths.  Bracket comes from the K1/K2 digit-product sandwich.
// Enumeration is sharded by leading digit across threads; each shard sums
// in lexicographic order with compensated accumulation, so results are
// independent of thread scheduling.  Full-alphabet affine systems delegate
// to the analytic series (the level value is n-independent there).
PressureEstimate partition_sum(const SystemSpec& sys, std::size_t n, double s);

// Same enumeration pass shared across several exponents.
std::vector<PressureEstimate> partition_sum_multi(const SystemSpec& sys, std::size_t n,
                                                  const std::vector<double>& s_values);

// log of the leading eigenvalue of the discretized transfer operator
// (Lf)(x) = sum_a |T_a'(x)|^s f(T_a(x)) on a uniform grid with
// piecewise-linear interpolation; power iteration from the constant vector
// to relative tolerance 1e-12.  Bracket: row sums with the zeta/lambda
// tables in place of pointwise derivatives.
PressureEstimate pressure_eigenvalue(const SystemSpec& sys, double s, std::size_t grid_size);

// Full-alphabet pressure for affine kinds: direct series plus analytic
// tail (Euler-Maclaurin); value accurate to ~1e-13 absolute.
PressureEstimate pressure_series(const SystemSpec& sys, double s);

// Certified upper bound on P(s) - P_M(s) for the truncated system (the
// removed digits re-weight the leading eigenfunction, so the raw weight
// tail is doubled to cover that amplification, which is at most 1/log 2
// for the reciprocal-length families).
double truncation_tail_bound(const SystemSpec& sys, double s);

struct TailExtrapolation {
  std::vector<PressureEstimate> per_M;  // P_M(s) for each requested truncation
  PressureEstimate final;               // bracket [P_Mmax, P_Mmax + tail]
};

TailExtrapolation pressure_tail_extrapolate(const SystemSpec& sys, double s,
                                            const std::vector<std::uint64_t>& M_list,
                                            std::size_t grid_size = 512);

struct PressurePropertyReport {
  bool decreasing = true;
  bool convex = true;
  bool lipschitz_ok = true;
  std::vector<double> offending_s;  // grid points where a check failed
  double max_abs_slope = 0;
  double slope_bound = 0;
  std::vector<double> values;  // P at each grid point, for diagnostics
};

// Grid checks of pressure shape: strict decrease, discrete convexity
// (second differences >= -1e-9), and slope bounded by the derivative-table
// Lipschitz constant.  Uses level-n partition sums for gauss and the
// closed form (series or level-1 sum) for affine kinds.
PressurePropertyReport pressure_properties_check(const SystemSpec& sys,
                                                 const std::vector<double>& s_grid,
                                                 std::size_t n);

struct SMeasureWeights {
  std::uint64_t M = 0;
  std::size_t n = 0;
  double s = 0;
  std::vector<double> weights;  // lexicographic word order, sums to 1
  double normalization = 0;     // Z_{M,n}(s)
  double log_normalization = 0;

  Word word_at(std::size_t index) const;
  std::size_t index_of(const Word& w) const;
  double weight_of(const Word& w) const { return weights[index_of(w)]; }
};

// Level-n cylinder weights |C[w]|^s / Z_{M,n}(s) (cap M^n <= 1e7).
SMeasureWeights s_measure_weights(const SystemSpec& sys, std::size_t n, double s);

// Production dispatch: series for full-alphabet affine, exact level-1 sum
// for truncated affine, transfer eigenvalue for gauss.
PressureEstimate pressure_auto(const SystemSpec& sys, double s, std::size_t grid_size = 512);

// Sum over the active alphabet of branch_length(a)^s (the exact level-1
// partition sum; for affine kinds this exponentiates to every level).
double level1_weight_sum(const SystemSpec& sys, double s);

// Sum over digits a >= c of (a(a+1))^(-s): the full-alphabet lueroth digit
// weight tail, via direct summation and an Euler-Maclaurin tail.  Valid for
// s > 1/2; c >= 1.
double lueroth_tail_sum(double s, double c);

// Sum over integers a >= c of a^(-x) for x > 1 (used by sandwich brackets).
double power_tail_sum(double x, double c);

}  // namespace ifsdim
