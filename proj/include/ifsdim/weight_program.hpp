#pragma once

#include <cstdint>
#include <vector>

#include "ifsdim/bigrat.hpp"

namespace ifsdim {

// Exponent program behind the dimension formula.  For weights t_1..t_k
// (t_j > 0), decay d > 1 and exponent s, the per-position exponents are
//   A_m(b) = (d-1) s b_m + (d s - 1) sum_{j<m} b_j,      m = 1..k,
// and A(s) is the minimum of max_m A_m(b) over the simplex
//   { b >= 0 : sum_j t_j b_j = 1 }.
// Positions cap: k <= 16.
inline constexpr std::size_t kMaxPositions = 16;

struct AResult {
  double A = 0;            // optimal value of the min-max
  std::vector<double> b;   // lexicographically smallest optimal b
  std::size_t pivots = 0;  // total simplex pivots (diagnostic)
};

// Dense-simplex solve (Bland's rule; feasibility tolerance 1e-12, optimal
// face slack 1e-10 for the lexicographic refinement passes).
AResult a_of_s(const std::vector<double>& t, double d, double s);

// Same program in exact rational arithmetic: zero tolerances, exact
// lexicographic argmin.  Used to cross-check the floating solve.
struct ARationalResult {
  BigRat A;
  std::vector<BigRat> b;
  std::size_t pivots = 0;
};
ARationalResult a_of_s_exact(const std::vector<BigRat>& t, const BigRat& d, const BigRat& s);

// Exhaustive lattice scan of the same objective: b_1..b_{k-1} run over a
// grid of the given step (b_k closes the simplex constraint).  Step must
// lie in [1e-5, 1e-1]; scans beyond 1e8 lattice points refuse up front.
struct GridScan {
  double A = 0;           // lattice minimum of max_m A_m
  std::vector<double> b;  // lexicographically first lattice argmin
  std::uint64_t points = 0;
};
GridScan a_of_s_grid(const std::vector<double>& t, double d, double s, double step);

// max_m A_m(b) for one explicit b (no simplex-constraint check).
double a_objective(const std::vector<double>& t, double d, double s,
                   const std::vector<double>& b);

// Single exponent A_m(b) for 1-based position m <= b.size().
double a_component(double d, double s, const std::vector<double>& b, std::size_t m);

}  // namespace ifsdim
