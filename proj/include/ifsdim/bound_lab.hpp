#pragma once

#include <cstdint>
#include <vector>

#include "ifsdim/bigrat.hpp"
#include "ifsdim/ifs.hpp"
#include "ifsdim/rng.hpp"
#include "ifsdim/target.hpp"

namespace ifsdim {

// ---------------------------------------------------------------------------
// Cover costs.  E_n = { x : prod_m a_{n+i_m}^{t_m}(x) >= B^n } is covered by
// k families: family t collects the tuples whose running digit product first
// reaches B^n at position i_t, and its elements are tail unions over the
// last special digit.  For affine systems the cost decomposes exactly into
// free-digit sums times the special-digit sum; the nonlinear family carries
// a per-digit sandwich factor instead and reports a bracket.
// ---------------------------------------------------------------------------

struct CoverCost {
  double cost = 0;  // affine: exact; nonlinear: geometric mean of [lo, hi]
  double lo = 0, hi = 0;
  std::uint64_t elements = 0;  // cover elements (one per admissible prefix)
  bool tie_flag = false;  // some product hit the threshold inside the log guard
};

// Caps: B^n <= 1e5, at most 3 special positions, 1e7 enumerated prefixes.
CoverCost cover_cost_exact(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                           double s);

// Coarser block upper bound: special digits are grouped into blocks
// (B^{n(l-1)delta}, B^{n l delta}] and each block contributes its worst
// corner.  Always >= the exact cost; used for comparison only.
double cover_cost_block_bound(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                              double s, double delta);

// Membership of one special-digit tuple in the constructed cover (family
// search).  Drives the exhaustive cover-validity checks.
bool cover_tuple_covered(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                         const std::vector<std::uint64_t>& special_digits);

struct TransitionRow {
  double s = 0;
  double slope = 0;    // least-squares slope of log cost against n
  double stderr_ = 0;  // standard error of that slope
};

struct TransitionEstimate {
  double s_cross = 0;    // grid-interpolated zero of the fitted slope
  double halfwidth = 0;  // propagated slope errors at the crossing
  std::vector<TransitionRow> rows;
};

// Fits the per-level exponent of the cover cost over n in [n_lo, n_hi]
// (at least 3 levels) for each s in the increasing grid, and locates the
// sign change.  block_mode swaps in cover_cost_block_bound with the given
// delta.
TransitionEstimate cover_cost_transition(const SystemSpec& sys, const TargetSpec& target,
                                         std::uint32_t n_lo, std::uint32_t n_hi,
                                         const std::vector<double>& s_grid,
                                         bool block_mode = false, double delta = 0.05);

// ---------------------------------------------------------------------------
// Cantor subset F and its measure.  Digits are free (bounded by M, weighted
// by the normalized s-powers of the digit lengths), special (uniform over
// [floor(X)+1, floor(2X)], X = B^{n_j b_m}), or filler ones between special
// positions.  The measure is a per-position product, which keeps the tree
// implicit: conservation, sampling, and ball masses never materialize it.
// ---------------------------------------------------------------------------

enum class PositionRole { free_block, special_digit, filler_ones };

struct PositionInfo {
  PositionRole role = PositionRole::free_block;
  std::uint64_t first = 1, last = 1;  // admissible digit range at this position
  int stage = 0;                      // 1-based construction stage
  int special_m = 0;                  // 1-based special index, special positions only
};

struct CantorSpec {
  std::vector<std::uint64_t> levels;  // n_1 < n_2 < ...; stage j ends at n_j + i_k
  std::vector<double> b;              // simplex point: sum_j t_j b_j = 1, b >= 0
  double s = 0.7;                     // exponent for the free-digit weights
  std::uint64_t M = 10;               // free-digit alphabet bound
};

// Builds the parameters the construction wants: s = critical exponent of sys,
// b = the exponent-program argmin there, levels n_1, n_1^2, ... (squaring).
CantorSpec make_cantor_spec(const SystemSpec& sys, const TargetSpec& target, std::uint64_t n1,
                            std::size_t stages, std::uint64_t M, double tol = 1e-9);

void validate_cantor(const SystemSpec& sys, const TargetSpec& target, const CantorSpec& spec);

// Last digit index of the given 1-based stage: n_j + i_k.
std::uint64_t cantor_stage_boundary(const TargetSpec& target, const CantorSpec& spec,
                                    std::size_t stage);

// Role and digit range of 1-based position i (<= last stage boundary).
PositionInfo cantor_position(const SystemSpec& sys, const TargetSpec& target,
                             const CantorSpec& spec, std::uint64_t i);

struct MeasureNode {
  std::vector<std::uint64_t> digits;
  double mass = 0;
  double lo = 0, hi = 0;  // cylinder interval
};

// Explicit cylinder tree at a stage boundary; refuses beyond 2e6 nodes
// (the implicit-measure operations below have no such limit).
std::vector<MeasureNode> cantor_generate(const SystemSpec& sys, const TargetSpec& target,
                                         const CantorSpec& spec, std::size_t stage);

// |1 - total mass| through the stage boundary, computed as the product of
// per-position digit-mass sums (the measure is a product measure).
double cantor_conservation(const SystemSpec& sys, const TargetSpec& target,
                           const CantorSpec& spec, std::size_t stage);

// One leaf path through the last stage, drawn position-wise from the
// measure (free digits by weight, special digits uniformly).
std::vector<std::uint64_t> cantor_sample_leaf(const SystemSpec& sys, const TargetSpec& target,
                                              const CantorSpec& spec, const SplitRng& stream);

// Digit-product membership at every realized stage, with the 1e-12 log
// guard of the cover side.
bool cantor_leaf_in_target(const SystemSpec& sys, const TargetSpec& target,
                           const CantorSpec& spec, const std::vector<std::uint64_t>& digits);

// mu([lo, hi]) by exact interval walk over the implicit tree (lueroth
// only); the measure of anything below the generated depth is counted in
// full, so the result can only overestimate.
double cantor_ball_mass(const SystemSpec& sys, const TargetSpec& target, const CantorSpec& spec,
                        const BigRat& lo, const BigRat& hi);

struct LocalDimRow {
  double x = 0;        // sampled point (cylinder midpoint at the deepest level)
  double r = 0;        // ball size = cylinder length at `depth`
  double ratio = 0;    // log mu(B_r(x)) / log r
  int case_label = 0;  // 1 = head block, 2 = special vicinity, 3 = between stages
  std::uint32_t depth = 0;
};

struct LocalDimStats {
  double min_ratio = 0;
  double mean_ratio = 0;
  std::vector<LocalDimRow> rows;
};

// Samples leaves and reports log mu(B_r(x))/log r for balls at the
// cylinder scales r_n, n_1 <= n <= last boundary (shallower scales mix
// construction stages and say nothing about the local dimension).  B_r(x)
// is the interval of width r centred on x, the one-dimensional ball at
// that scale.  Deterministic in (seed, samples) regardless of thread
// count.
LocalDimStats local_dimension_sample(const SystemSpec& sys, const TargetSpec& target,
                                     const CantorSpec& spec, std::size_t samples,
                                     std::uint64_t seed);

// The sigma where the stage-wise length sum sum |C|^sigma neither grows nor
// decays between the last two stage boundaries (bisected; needs >= 2
// stages).  An empirical dimension estimate for F.
double natural_cover_exponent(const SystemSpec& sys, const TargetSpec& target,
                              const CantorSpec& spec);

}  // namespace ifsdim
