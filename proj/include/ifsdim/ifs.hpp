#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ifsdim/bigrat.hpp"

namespace ifsdim {

enum class SystemKind { gauss, lueroth, powerlaw };

std::string kind_name(SystemKind k);
SystemKind kind_from_name(const std::string& name);

// Alphabet truncation sentinel: select the full (infinite or normalization-
// truncation) alphabet where an operation supports it.
inline constexpr std::uint64_t kFullAlphabet = 0;

struct PowerlawTables;  // lazily built normalization data (powerlaw only)

// A d-decaying interval IFS over the digit alphabet {1..M} (or the full
// alphabet when M == kFullAlphabet).  All three built-in families use
// map-index digits a >= 1 with digit 1 owning the rightmost level-1 branch:
//   gauss:    T_a(y) = 1/(a+y)            (decreasing), image [1/(a+1), 1/a]
//   lueroth:  T_a(y) = (y+a)/(a(a+1))     (increasing), image [1/(a+1), 1/a]
//   powerlaw: affine increasing branches of length a^(-d)/Z stacked
//             right-to-left, Z = sum over the normalization truncation.
struct SystemSpec {
  SystemKind kind = SystemKind::lueroth;
  double d = 2.0;          // decay exponent (fixed 2 for gauss/lueroth)
  std::uint64_t M = 100;   // alphabet truncation; kFullAlphabet = full

  static constexpr std::uint64_t kMaxDigitQuery = 1'000'000;  // level-1 cap
  static constexpr std::size_t kMaxWordLen = 64;
  static constexpr std::uint64_t kNormTruncation = 1'000'000;  // powerlaw Z

  bool full_alphabet() const { return M == kFullAlphabet; }
  bool affine() const { return kind != SystemKind::gauss; }
  // Largest digit usable in explicit queries for this spec.
  std::uint64_t max_query_digit() const {
    return full_alphabet() ? kMaxDigitQuery : M;
  }

  std::shared_ptr<const PowerlawTables> tables;  // set for powerlaw
};

SystemSpec make_gauss(std::uint64_t M);
SystemSpec make_lueroth(std::uint64_t M);
SystemSpec make_powerlaw(double d, std::uint64_t M);
SystemSpec make_system(SystemKind kind, double d, std::uint64_t M);

// Derivative-bound tables (per-digit min/max of |T_a'|); exact for the
// built-in families: gauss 1/(a+1)^2..1/a^2, affine kinds zeta == lambda.
double zeta_digit(const SystemSpec& sys, std::uint64_t a);
double lambda_digit(const SystemSpec& sys, std::uint64_t a);
// Level-1 branch length |C[a]| as a double (== lambda for affine kinds).
double branch_length(const SystemSpec& sys, std::uint64_t a);

// Sandwich constants: K1 = min_a zeta_a * a^d, K2 = max_a lambda_a * a^d
// over the active alphabet, so that K1^n * prod a_i^(-d) <= |C[w]| <=
// K2^n * prod a_i^(-d) for every word.
double k1_constant(const SystemSpec& sys);
double k2_constant(const SystemSpec& sys);

// Smallest m with a uniform contraction bound h < 1 over all m-fold branch
// compositions, together with that h (gauss: m=2, h=1/4; affine: m=1).
std::pair<int, double> contraction_certificate(const SystemSpec& sys);

struct Word {
  std::vector<std::uint64_t> digits;

  Word() = default;
  explicit Word(std::vector<std::uint64_t> d) : digits(std::move(d)) {}
  std::size_t size() const { return digits.size(); }
  std::string joined() const;  // "a1/a2/.../an" for CSV dumps
};

struct CylinderInterval {
  Word word;
  BigRat lo, hi;      // exact endpoints, lo < hi
  BigRat length;      // hi - lo
  double log_length;  // natural log (safe for tiny lengths)
  int orientation;    // +1 if the composed branch is increasing on [0,1]
  // Bounds for log |(T_w)'| over [0,1] (equal for affine kinds).
  double log_deriv_min, log_deriv_max;
};

CylinderInterval cylinder_interval(const SystemSpec& sys, const Word& w);

// Hull of the contiguous sibling run D[a1..an] = union over i >= an of
// C[a1..a(n-1), i].  Reports both the truncated hull (i up to M) and the
// hull extended by the infinite-tail limit endpoint T_prefix(0).
struct TailUnion {
  Word word;
  BigRat lo, hi;            // hull over i in {a_n .. M}
  BigRat limit_endpoint;    // lim over i of the far edge of C[prefix, i]
  BigRat lo_full, hi_full;  // hull including the limit endpoint
};

TailUnion tail_union(const SystemSpec& sys, const Word& w);

struct Expansion {
  std::vector<std::uint64_t> digits;
  // x landed exactly on a cylinder boundary; the expansion stops there and
  // the emitted prefix is the right-cylinder reading of the tie.
  bool hit_endpoint = false;
  // A digit exceeded the truncated alphabet (the point lies in the gap not
  // covered by {1..M}); expansion stops before emitting it.
  bool outside_alphabet = false;
};

// Digit expansion of x in [0,1); produces at most max_digits digits.  The
// double overload treats remainders within 1e-9 of a boundary as exact
// endpoint hits; the rational overload decides ties exactly.
Expansion expand(const SystemSpec& sys, double x, std::size_t max_digits);
Expansion expand(const SystemSpec& sys, const BigRat& x, std::size_t max_digits);

struct DistortionRow {
  std::size_t n = 0;           // word length
  std::size_t words = 0;       // sample count at this length
  double max_distortion = 0;   // max over sampled words of log(sup|T_w'| / inf|T_w'|)
  double mean_distortion = 0;
};

struct DistortionReport {
  std::vector<DistortionRow> per_level;
};

// Exact distortion log(sup|T_w'| / inf|T_w'|) of one composed branch over
// its cylinder: affine kinds give exactly 0, gauss 2*log(1 + q_{n-1}/q_n).
double word_distortion(const SystemSpec& sys, const Word& w);

// Measured distortion over sampled words of length 1..n_max.
DistortionReport distortion_report(const SystemSpec& sys, std::size_t n_max,
                                   std::size_t samples_per_level,
                                   std::uint64_t seed);

// Uniform distortion ceiling for any word of the system (used as the
// rho-hat diagnostic bound): gauss 2 log 2, affine kinds 0.
double distortion_ceiling(const SystemSpec& sys);

namespace detail {
// Continuant state for gauss words: T_w(y) = (p_prev*y + p)/(q_prev*y + q).
struct Continuants {
  BigInt p_prev = 1, p = 0, q_prev = 0, q = 1;
  void push(std::uint64_t a) {
    BigInt np = a * p + p_prev, nq = a * q + q_prev;
    p_prev.swap(p);
    q_prev.swap(q);
    p.swap(np);
    q.swap(nq);
  }
};

// Affine composition state: T_w(y) = offset + scale * y (scale > 0).
struct AffineComp {
  BigRat offset = 0, scale = 1;
  void push_lueroth(std::uint64_t a);
  void push_powerlaw(const SystemSpec& sys, std::uint64_t a);
};

// Exact powerlaw branch data: left endpoint and width of C[a], both as
// rationals over the shared normalization denominator.
void powerlaw_branch(const SystemSpec& sys, std::uint64_t a, BigRat& lo,
                     BigRat& width);
double powerlaw_norm_double(const SystemSpec& sys);
}  // namespace detail

}  // namespace ifsdim
