#include "ifsdim/bound_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "ifsdim/dimension.hpp"
#include "ifsdim/errors.hpp"
#include "ifsdim/pressure.hpp"
#include "ifsdim/weight_program.hpp"

namespace ifsdim {

namespace {

constexpr double kLogGuard = 1e-12;
constexpr double kCoverThresholdCap = 1e5;        // largest allowed B^n
constexpr std::size_t kCoverPositionCap = 3;      // special positions in enumeration
constexpr std::uint64_t kCoverPrefixCap = 10'000'000;
constexpr std::uint64_t kCantorNodeCap = 2'000'000;
constexpr std::uint64_t kCantorDepthCap = 1'000'000;
constexpr double kSpecialRangeCap = 9007199254740992.0;  // 2^53: exact doubles

struct Kahan {
  double sum = 0, c = 0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

// ---------------------------------------------------------------------------
// Cover-side digit weights.  Affine kinds carry exact branch lengths; gauss
// uses the comparison weight a^(-d) and pushes the K1/K2 sandwich into the
// reported bracket.
// ---------------------------------------------------------------------------

double cover_weight(const SystemSpec& sys, std::uint64_t a, double s) {
  if (sys.affine()) return std::pow(branch_length(sys, a), s);
  return std::pow(double(a), -sys.d * s);
}

// Sum over the active alphabet of the level-1 cover weights at exponent s.
double cover_weight_sum(const SystemSpec& sys, double s) {
  if (sys.affine()) return level1_weight_sum(sys, s);
  if (sys.full_alphabet()) {
    if (sys.d * s <= 1 + 1e-12) {
      throw ConfigError("free-digit weight sum diverges at this exponent");
    }
    return power_tail_sum(sys.d * s, 1);
  }
  Kahan k;
  for (std::uint64_t a = 1; a <= sys.M; ++a) k.add(std::pow(double(a), -sys.d * s));
  return k.sum;
}

// Sum over alphabet digits a >= c of the level-1 cover weight (exponent 1):
// the length of the sibling tail union in the local frame.  Returns 0 when
// the truncated alphabet cannot reach c.
double cover_tail_length(const SystemSpec& sys, std::uint64_t c) {
  const double cd = double(c);
  switch (sys.kind) {
    case SystemKind::lueroth: {
      if (sys.full_alphabet()) return 1.0 / cd;
      if (c > sys.M) return 0.0;
      return 1.0 / cd - 1.0 / double(sys.M + 1);
    }
    case SystemKind::powerlaw: {
      const std::uint64_t top = sys.max_query_digit();
      if (c > top) return 0.0;
      const double z = detail::powerlaw_norm_double(sys);
      return (power_tail_sum(sys.d, cd) - power_tail_sum(sys.d, double(top) + 1)) / z;
    }
    case SystemKind::gauss: {
      if (sys.full_alphabet()) return power_tail_sum(sys.d, cd);
      if (c > sys.M) return 0.0;
      return power_tail_sum(sys.d, cd) - power_tail_sum(sys.d, double(sys.M) + 1);
    }
  }
  throw NumericError("unreachable digit kind");
}

// Threshold comparisons against the remaining log budget, with the shared
// guard: "reached" at equality within 1e-12 counts as reached and raises
// the tie flag.
struct Budget {
  double remaining;  // log(B^n) minus the spent prefix weight
  bool* tie;

  bool reached(double t_m, std::uint64_t a) const {
    const double v = t_m * std::log(double(a));
    if (std::abs(v - remaining) <= kLogGuard) *tie = true;
    return v >= remaining - kLogGuard;
  }
};

// Largest digit that keeps the running product strictly below the
// threshold (0 when even digit 1 reaches it).
std::uint64_t last_free_digit(const Budget& b, double t_m, std::uint64_t alphabet_cap) {
  if (b.reached(t_m, 1)) return 0;
  const double guess = std::exp(b.remaining / t_m);
  std::uint64_t a = 1;
  if (guess > double(alphabet_cap)) {
    a = alphabet_cap;
  } else if (guess > 2.0) {
    a = std::uint64_t(guess);
  }
  while (a > 1 && b.reached(t_m, a)) --a;
  while (a < alphabet_cap && !b.reached(t_m, a + 1)) ++a;
  return a;
}

// Smallest digit that reaches the threshold.
std::uint64_t first_reaching_digit(const Budget& b, double t_m) {
  const double guess = std::exp(b.remaining / t_m);
  std::uint64_t c = guess < 1.5 ? 1 : std::uint64_t(guess);
  while (c > 1 && b.reached(t_m, c - 1)) --c;
  while (!b.reached(t_m, c)) ++c;
  return c;
}

void check_cover_args(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                      double s) {
  validate_target(target);
  if (target.k() > kCoverPositionCap) {
    throw ConfigError("cover enumeration supports at most 3 special positions");
  }
  if (n == 0) throw ConfigError("cover level n must be positive");
  if (double(n) * std::log(target.B) > std::log(kCoverThresholdCap) + 1e-9) {
    throw SizeCapError("cover threshold B^n exceeds the 1e5 enumeration cap");
  }
  if (!std::isfinite(s) || s <= 0) throw ConfigError("cover exponent must be positive");
}

// ---------------------------------------------------------------------------
// Cantor-side helpers.
// ---------------------------------------------------------------------------

// Special-digit range at threshold scale X = B^{n_j b_m}: digits
// floor(X)+1 .. floor(2X).
void special_range(double B, double level, double b_m, std::uint64_t& first,
                   std::uint64_t& last) {
  const double X = std::pow(B, level * std::max(0.0, b_m));
  if (!(X < kSpecialRangeCap / 2)) {
    throw SizeCapError("special digit range exceeds the 2^53 sampling cap");
  }
  first = std::uint64_t(std::floor(X)) + 1;
  last = std::uint64_t(std::floor(2 * X));
}

// Normalized free-digit masses w_a^s / Z with prefix sums for sampling and
// bulk interval masses.
struct FreeTable {
  std::vector<double> mass;  // index a-1
  std::vector<double> cdf;   // cdf[j] = sum of mass[0..j-1], size M+1
  double total = 0;          // recomputed sum of mass (conservation input)
};

FreeTable build_free_table(const SystemSpec& sys, const CantorSpec& spec) {
  FreeTable t;
  t.mass.resize(spec.M);
  Kahan z;
  for (std::uint64_t a = 1; a <= spec.M; ++a) {
    t.mass[a - 1] = std::pow(branch_length(sys, a), spec.s);
    z.add(t.mass[a - 1]);
  }
  Kahan total;
  t.cdf.resize(spec.M + 1, 0.0);
  for (std::uint64_t a = 1; a <= spec.M; ++a) {
    t.mass[a - 1] /= z.sum;
    total.add(t.mass[a - 1]);
    t.cdf[a] = t.cdf[a - 1] + t.mass[a - 1];
  }
  t.total = total.sum;
  return t;
}

// Exact lueroth cylinder push: T_a maps [0,1] onto [1/(a+1), 1/a], so the
// composed interval picks up offset sc/(a+1) and shrinks by a(a+1).
void push_lueroth_exact(BigRat& off, BigRat& sc, std::uint64_t a) {
  const BigInt av(a);
  off += sc / BigRat(av + 1);
  sc /= BigRat(av * (av + 1));
}

void push_affine_exact(const SystemSpec& sys, BigRat& off, BigRat& sc, std::uint64_t a) {
  if (sys.kind == SystemKind::lueroth) {
    push_lueroth_exact(off, sc, a);
    return;
  }
  BigRat lo, width;
  detail::powerlaw_branch(sys, a, lo, width);
  off += sc * lo;
  sc *= width;
}

std::uint64_t rat_floor(const BigRat& q) {
  return BigInt(numerator(q) / denominator(q)).convert_to<std::uint64_t>();
}

std::uint64_t rat_ceil(const BigRat& q) {
  const BigInt n = numerator(q), d = denominator(q);
  BigInt f = n / d;
  if (n % d != 0) ++f;
  return f.convert_to<std::uint64_t>();
}

// Digit whose lueroth level-1 interval [1/(a+1), 1/a) contains y in (0,1].
std::uint64_t lueroth_digit_at(const BigRat& y) {
  if (y >= 1) return 1;
  const std::uint64_t a = rat_ceil(BigRat(denominator(y), numerator(y)));
  return a <= 1 ? 1 : a - 1;
}

struct PositionLayout {
  std::vector<PositionInfo> info;  // 1-based; info[0] unused
  std::uint64_t boundary = 0;      // last generated digit index
};

PositionLayout build_layout(const SystemSpec& sys, const TargetSpec& target,
                            const CantorSpec& spec) {
  PositionLayout lay;
  lay.boundary = cantor_stage_boundary(target, spec, spec.levels.size());
  lay.info.resize(lay.boundary + 1);
  for (std::uint64_t i = 1; i <= lay.boundary; ++i) {
    lay.info[i] = cantor_position(sys, target, spec, i);
  }
  return lay;
}

// Shared state of one exact ball-mass walk (lueroth geometry).
struct BallWalk {
  const PositionLayout& lay;
  const FreeTable& table;
  BigRat lo, hi;  // query interval, clipped to [0,1]

  double run(std::uint64_t i, const BigRat& off, const BigRat& sc, double mass) const {
    const BigRat cyl_hi = off + sc;
    if (!(off < hi && cyl_hi > lo)) return 0.0;
    if (lo <= off && cyl_hi <= hi) return mass;
    if (i > lay.boundary) return mass;  // below generated depth: count in full
    const PositionInfo& p = lay.info[i];
    if (p.role == PositionRole::filler_ones) {
      BigRat o = off, s = sc;
      push_lueroth_exact(o, s, 1);
      return run(i + 1, o, s, mass);
    }
    // Digit range [first,last]; local coordinates y = (x - off)/sc.
    const BigRat y_lo = off >= lo ? BigRat(0) : (lo - off) / sc;
    const BigRat y_hi = cyl_hi <= hi ? BigRat(1) : (hi - off) / sc;
    const std::uint64_t a_lo = std::max(p.first, lueroth_digit_at(y_hi));
    const std::uint64_t a_hi = y_lo > 0 ? std::min(p.last, lueroth_digit_at(y_lo)) : p.last;
    if (a_lo > a_hi) return 0.0;
    // Fully contained digits: 1/a <= y_hi and 1/(a+1) >= y_lo.
    std::uint64_t in_lo = y_hi >= 1 ? a_lo : std::max(a_lo, rat_ceil(BigRat(denominator(y_hi), numerator(y_hi))));
    std::uint64_t in_hi = a_hi;
    if (y_lo > 0) {
      const std::uint64_t f = rat_floor(BigRat(denominator(y_lo), numerator(y_lo)));
      in_hi = f >= 1 ? std::min(a_hi, f - 1) : 0;
    }
    double out = 0.0;
    const bool uniform = p.role == PositionRole::special_digit;
    const double count = double(p.last - p.first + 1);
    if (in_lo <= in_hi && in_hi >= a_lo && in_lo <= a_hi) {
      if (uniform) {
        out += mass * (double(in_hi - in_lo + 1) / count);
      } else {
        out += mass * (table.cdf[in_hi] - table.cdf[in_lo - 1]);
      }
    } else {
      in_lo = 1;  // empty contained run: recurse over the whole overlap
      in_hi = 0;
    }
    auto descend = [&](std::uint64_t a) {
      const double dm = uniform ? mass / count : mass * table.mass[a - 1];
      BigRat o = off, s = sc;
      push_lueroth_exact(o, s, a);
      out += run(i + 1, o, s, dm);
    };
    for (std::uint64_t a = a_lo; a <= a_hi && (in_hi < in_lo || a < in_lo); ++a) descend(a);
    if (in_lo <= in_hi) {
      for (std::uint64_t a = in_hi + 1; a <= a_hi; ++a) descend(a);
    }
    return out;
  }
};

void require_lueroth(const SystemSpec& sys, const char* what) {
  if (sys.kind != SystemKind::lueroth) {
    throw ConfigError(std::string(what) + " supports the lueroth digit system only");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Cover costs.
// ---------------------------------------------------------------------------

CoverCost cover_cost_exact(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                           double s) {
  check_cover_args(sys, target, n, s);
  const std::size_t k = target.k();
  const double R = double(n) * std::log(target.B);
  const double z_free = cover_weight_sum(sys, s);
  const std::uint64_t alphabet_cap =
      sys.full_alphabet() && sys.kind != SystemKind::powerlaw
          ? std::numeric_limits<std::uint64_t>::max() / 4
          : sys.max_query_digit();

  CoverCost out;
  Budget budget{R, &out.tie_flag};
  std::uint64_t visited = 0;

  double lo_sum = 0, hi_sum = 0;
  const double k1 = sys.affine() ? 1.0 : k1_constant(sys);
  const double k2 = sys.affine() ? 1.0 : k2_constant(sys);

  for (std::size_t t = 1; t <= k; ++t) {
    Kahan family;  // sum over admissible prefixes of prod W^s * Tail^s
    // Enumerate special digits a_1..a_{t-1} with running product strictly
    // below B^n; the t-th position contributes the closed-form tail union
    // from the first reaching digit.
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t m, double spent,
                                                               double wprod) {
      if (++visited > kCoverPrefixCap) {
        throw SizeCapError("cover enumeration exceeds the 1e7 prefix cap");
      }
      if (m == t) {
        budget.remaining = R - spent;
        const std::uint64_t c = first_reaching_digit(budget, target.weights[m - 1]);
        const double tail = cover_tail_length(sys, c);
        if (tail > 0) {
          family.add(wprod * std::pow(tail, s));
          ++out.elements;
        }
        return;
      }
      budget.remaining = R - spent;
      const std::uint64_t amax = last_free_digit(budget, target.weights[m - 1], alphabet_cap);
      for (std::uint64_t a = 1; a <= amax; ++a) {
        rec(m + 1, spent + target.weights[m - 1] * std::log(double(a)),
            wprod * cover_weight(sys, a, s));
      }
    };
    rec(1, 0.0, 1.0);

    const double len = double(n) + double(target.positions[t - 1]);
    const double free_count = len - double(t);
    const double x = std::pow(z_free, free_count) * family.sum;
    lo_sum += std::pow(k1, s * len) * x;
    hi_sum += std::pow(k2, s * len) * x;
  }

  out.lo = lo_sum;
  out.hi = hi_sum;
  out.cost = sys.affine() ? hi_sum : std::sqrt(lo_sum * hi_sum);
  return out;
}

double cover_cost_block_bound(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                              double s, double delta) {
  check_cover_args(sys, target, n, s);
  if (!(delta > 0 && delta <= 0.5)) {
    throw ConfigError("block width delta must lie in (0, 0.5]");
  }
  const std::size_t k = target.k();
  const double logB = std::log(target.B);
  const double z_free = cover_weight_sum(sys, s);
  const double k2 = sys.affine() ? 1.0 : k2_constant(sys);
  const double d = sys.d;

  double total = 0;
  for (std::size_t t = 1; t <= k; ++t) {
    // Blocks l >= 1 hold digits in (B^{n(l-1)delta}, B^{n l delta}]; the
    // bound charges each block tuple its worst corner: count <= upper end,
    // per-digit weight <= lower end^{-d}, tail length at the lower corner.
    std::vector<std::uint64_t> lmax(t);
    for (std::size_t m = 0; m < t; ++m) {
      lmax[m] = std::uint64_t(std::ceil(1.0 / (target.weights[m] * delta))) + 1;
    }
    Kahan family;
    std::vector<std::uint64_t> l(t, 1);
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t m, double frac,
                                                               double wprod) {
      // frac = sum_{m' < m} (l_{m'} - 1) t_{m'} delta, the lower-corner
      // budget fraction; must stay below 1 for a continuing prefix.
      if (m + 1 == t) {
        for (std::uint64_t lt = 1; lt <= lmax[m]; ++lt) {
          double full = 0;
          for (std::size_t j = 0; j < m; ++j) full += double(l[j]) * target.weights[j] * delta;
          full += double(lt) * target.weights[m] * delta;
          if (full < 1 - kLogGuard) continue;  // cannot reach the threshold
          const double corner = std::exp(double(n) * (double(lt) - 1) * delta * logB);
          const double tail = power_tail_sum(d, std::max(1.0, corner));
          family.add(wprod * std::pow(tail, s));
        }
        return;
      }
      for (std::uint64_t lm = 1; lm <= lmax[m]; ++lm) {
        const double nf = frac + (double(lm) - 1) * target.weights[m] * delta;
        if (nf >= 1 + kLogGuard) break;  // lower corner already reaches
        l[m] = lm;
        const double count = std::exp(double(n) * double(lm) * delta * logB);
        const double lo_end = std::exp(double(n) * (double(lm) - 1) * delta * logB);
        rec(m + 1, nf, wprod * count * std::pow(lo_end, -s * d));
      }
    };
    rec(0, 0.0, 1.0);

    const double len = double(n) + double(target.positions[t - 1]);
    total += std::pow(k2, s * len) * std::pow(z_free, len - double(t)) * family.sum;
  }
  return total;
}

bool cover_tuple_covered(const SystemSpec& sys, const TargetSpec& target, std::uint32_t n,
                         const std::vector<std::uint64_t>& special_digits) {
  check_cover_args(sys, target, n, 1.0);
  if (special_digits.size() != target.k()) {
    throw ConfigError("special digit tuple size must match the target positions");
  }
  for (std::uint64_t a : special_digits) {
    if (a == 0 || a > sys.max_query_digit()) {
      throw ConfigError("special digit outside the system alphabet");
    }
  }
  bool tie = false;
  double spent = 0;
  for (std::size_t m = 0; m < special_digits.size(); ++m) {
    Budget b{double(n) * std::log(target.B) - spent, &tie};
    if (b.reached(target.weights[m], special_digits[m])) return true;
    spent += target.weights[m] * std::log(double(special_digits[m]));
  }
  return false;
}

TransitionEstimate cover_cost_transition(const SystemSpec& sys, const TargetSpec& target,
                                         std::uint32_t n_lo, std::uint32_t n_hi,
                                         const std::vector<double>& s_grid, bool block_mode,
                                         double delta) {
  if (n_lo == 0 || n_hi < n_lo + 2) {
    throw ValidationError("transition fit needs at least 3 levels");
  }
  if (s_grid.size() < 2) throw ConfigError("transition grid needs at least 2 exponents");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!std::isfinite(s_grid[i]) || s_grid[i] <= 0 ||
        (i > 0 && s_grid[i] <= s_grid[i - 1])) {
      throw ConfigError("transition grid must be positive and strictly increasing");
    }
  }

  TransitionEstimate est;
  const double n_count = double(n_hi - n_lo + 1);
  const double n_mean = (double(n_lo) + double(n_hi)) / 2;
  double sxx = 0;
  for (std::uint32_t n = n_lo; n <= n_hi; ++n) sxx += (n - n_mean) * (n - n_mean);

  for (double s : s_grid) {
    std::vector<double> logs;
    logs.reserve(std::size_t(n_count));
    for (std::uint32_t n = n_lo; n <= n_hi; ++n) {
      const double cost = block_mode ? cover_cost_block_bound(sys, target, n, s, delta)
                                     : cover_cost_exact(sys, target, n, s).cost;
      if (!(cost > 0) || !std::isfinite(cost)) {
        throw ValidationError("cover cost vanished over the requested levels");
      }
      logs.push_back(std::log(cost));
    }
    double y_mean = 0;
    for (double y : logs) y_mean += y;
    y_mean /= n_count;
    double sxy = 0;
    for (std::uint32_t n = n_lo; n <= n_hi; ++n) {
      sxy += (n - n_mean) * (logs[n - n_lo] - y_mean);
    }
    const double slope = sxy / sxx;
    double rss = 0;
    for (std::uint32_t n = n_lo; n <= n_hi; ++n) {
      const double fit = y_mean + slope * (n - n_mean);
      const double r = logs[n - n_lo] - fit;
      rss += r * r;
    }
    const double se = std::sqrt(rss / std::max(1.0, n_count - 2) / sxx);
    est.rows.push_back({s, slope, se});
  }

  for (std::size_t i = 0; i + 1 < est.rows.size(); ++i) {
    const auto& a = est.rows[i];
    const auto& b = est.rows[i + 1];
    if (a.slope >= 0 && b.slope < 0) {
      const double grad = (b.slope - a.slope) / (b.s - a.s);
      est.s_cross = a.s + a.slope * (b.s - a.s) / (a.slope - b.slope);
      est.halfwidth = (a.stderr_ + b.stderr_) / (2 * std::abs(grad));
      return est;
    }
  }
  throw ValidationError("the fitted exponent never crosses zero on the grid");
}

// ---------------------------------------------------------------------------
// Cantor subset and measure.
// ---------------------------------------------------------------------------

CantorSpec make_cantor_spec(const SystemSpec& sys, const TargetSpec& target, std::uint64_t n1,
                            std::size_t stages, std::uint64_t M, double tol) {
  if (stages == 0 || stages > 4) throw ConfigError("stage count must lie in [1, 4]");
  if (n1 < 2) throw ConfigError("first stage level must be at least 2");
  CantorSpec spec;
  spec.M = M;
  const DimensionResult dim = critical_exponent(sys, target, tol);
  spec.s = dim.s0;
  spec.b = a_of_s(target.weights, sys.d, dim.s0).b;
  std::uint64_t level = n1;
  for (std::size_t j = 0; j < stages; ++j) {
    if (level > kCantorDepthCap) {
      throw SizeCapError("stage levels exceed the 1e6 depth cap");
    }
    spec.levels.push_back(level);
    level *= level;
  }
  validate_cantor(sys, target, spec);
  return spec;
}

void validate_cantor(const SystemSpec& sys, const TargetSpec& target, const CantorSpec& spec) {
  validate_target(target);
  if (!sys.affine()) {
    throw ConfigError("the product measure needs an affine digit system");
  }
  if (spec.M < 2 || spec.M > sys.max_query_digit()) {
    throw ConfigError("free-digit bound must lie in [2, alphabet size]");
  }
  if (!std::isfinite(spec.s) || spec.s <= 0) {
    throw ConfigError("free-digit exponent must be positive");
  }
  if (spec.b.size() != target.k()) {
    throw ConfigError("block exponents must match the target positions");
  }
  double dot = 0;
  for (std::size_t m = 0; m < spec.b.size(); ++m) {
    if (!std::isfinite(spec.b[m]) || spec.b[m] < -1e-12) {
      throw ConfigError("block exponents must be nonnegative");
    }
    dot += spec.b[m] * target.weights[m];
  }
  if (std::abs(dot - 1) > 1e-9) {
    throw ConfigError("block exponents must satisfy sum t_m b_m = 1");
  }
  if (spec.levels.empty() || spec.levels.size() > 4) {
    throw ConfigError("stage list must hold 1 to 4 levels");
  }
  if (spec.levels.front() < 2) throw ConfigError("first stage level must be at least 2");
  const std::uint64_t i1 = target.positions.front();
  const std::uint64_t ik = target.positions.back();
  for (std::size_t j = 1; j < spec.levels.size(); ++j) {
    if (spec.levels[j] <= spec.levels[j - 1]) {
      throw ConfigError("stage levels must be strictly increasing");
    }
    if (spec.levels[j] + i1 < spec.levels[j - 1] + ik + 1) {
      throw ConfigError("stages overlap: level spacing must exceed the position span");
    }
  }
  if (spec.levels.back() + ik > kCantorDepthCap) {
    throw SizeCapError("stage levels exceed the 1e6 depth cap");
  }
  for (std::uint64_t level : spec.levels) {
    for (std::size_t m = 0; m < target.k(); ++m) {
      std::uint64_t first = 0, last = 0;
      special_range(target.B, double(level), spec.b[m], first, last);  // throws on overflow
    }
  }
}

std::uint64_t cantor_stage_boundary(const TargetSpec& target, const CantorSpec& spec,
                                    std::size_t stage) {
  if (stage == 0 || stage > spec.levels.size()) {
    throw ConfigError("stage index outside the realized stages");
  }
  return spec.levels[stage - 1] + target.positions.back();
}

PositionInfo cantor_position(const SystemSpec& sys, const TargetSpec& target,
                             const CantorSpec& spec, std::uint64_t i) {
  (void)sys;
  if (i == 0) throw ConfigError("digit positions are 1-based");
  const std::uint64_t i1 = target.positions.front();
  PositionInfo p;
  for (std::size_t j = 0; j < spec.levels.size(); ++j) {
    const std::uint64_t nj = spec.levels[j];
    if (i < nj + i1) {
      p.role = PositionRole::free_block;
      p.first = 1;
      p.last = spec.M;
      p.stage = int(j + 1);
      return p;
    }
    const std::uint64_t boundary = nj + target.positions.back();
    if (i <= boundary) {
      p.stage = int(j + 1);
      for (std::size_t m = 0; m < target.k(); ++m) {
        if (i == nj + target.positions[m]) {
          p.role = PositionRole::special_digit;
          p.special_m = int(m + 1);
          special_range(target.B, double(nj), spec.b[m], p.first, p.last);
          return p;
        }
        if (i < nj + target.positions[m]) {
          p.role = PositionRole::filler_ones;
          p.special_m = int(m);  // gap after special index m
          p.first = p.last = 1;
          return p;
        }
      }
    }
  }
  throw ConfigError("digit position beyond the generated stages");
}

std::vector<MeasureNode> cantor_generate(const SystemSpec& sys, const TargetSpec& target,
                                         const CantorSpec& spec, std::size_t stage) {
  validate_cantor(sys, target, spec);
  const std::uint64_t N = cantor_stage_boundary(target, spec, stage);
  const FreeTable table = build_free_table(sys, spec);

  double expected = 1;
  std::vector<PositionInfo> info(N + 1);
  for (std::uint64_t i = 1; i <= N; ++i) {
    info[i] = cantor_position(sys, target, spec, i);
    expected *= double(info[i].last - info[i].first + 1);
    if (expected > double(kCantorNodeCap)) {
      throw SizeCapError("cantor stage enumeration exceeds the 2e6 node cap");
    }
  }

  std::vector<MeasureNode> out;
  out.reserve(std::size_t(expected));
  std::vector<std::uint64_t> digits(N);
  std::function<void(std::uint64_t, BigRat, BigRat, double)> rec =
      [&](std::uint64_t i, BigRat off, BigRat sc, double mass) {
        if (i > N) {
          MeasureNode node;
          node.digits = digits;
          node.mass = mass;
          node.lo = to_double(off);
          node.hi = to_double(off + sc);
          out.push_back(std::move(node));
          return;
        }
        const PositionInfo& p = info[i];
        const double count = double(p.last - p.first + 1);
        for (std::uint64_t a = p.first; a <= p.last; ++a) {
          double m = mass;
          switch (p.role) {
            case PositionRole::free_block: m *= table.mass[a - 1]; break;
            case PositionRole::special_digit: m /= count; break;
            case PositionRole::filler_ones: break;
          }
          digits[i - 1] = a;
          BigRat o = off, s = sc;
          push_affine_exact(sys, o, s, a);
          rec(i + 1, std::move(o), std::move(s), m);
        }
      };
  rec(1, BigRat(0), BigRat(1), 1.0);
  return out;
}

double cantor_conservation(const SystemSpec& sys, const TargetSpec& target,
                           const CantorSpec& spec, std::size_t stage) {
  validate_cantor(sys, target, spec);
  const std::uint64_t N = cantor_stage_boundary(target, spec, stage);
  const FreeTable table = build_free_table(sys, spec);
  // The measure is a product over positions, so the total mass at the
  // boundary is the product of the per-position digit-mass sums.
  double prod = 1;
  for (std::uint64_t i = 1; i <= N; ++i) {
    const PositionInfo p = cantor_position(sys, target, spec, i);
    switch (p.role) {
      case PositionRole::free_block: prod *= table.total; break;
      case PositionRole::special_digit: {
        const double count = double(p.last - p.first + 1);
        prod *= count * (1.0 / count);
        break;
      }
      case PositionRole::filler_ones: break;
    }
  }
  return std::abs(prod - 1);
}

std::vector<std::uint64_t> cantor_sample_leaf(const SystemSpec& sys, const TargetSpec& target,
                                              const CantorSpec& spec, const SplitRng& stream) {
  validate_cantor(sys, target, spec);
  const std::uint64_t N = cantor_stage_boundary(target, spec, spec.levels.size());
  const FreeTable table = build_free_table(sys, spec);
  std::vector<std::uint64_t> digits(N);
  for (std::uint64_t i = 1; i <= N; ++i) {
    const PositionInfo p = cantor_position(sys, target, spec, i);
    switch (p.role) {
      case PositionRole::free_block: {
        const double u = stream.unit(i);
        const auto it = std::upper_bound(table.cdf.begin() + 1, table.cdf.end(), u);
        std::uint64_t a = std::uint64_t(it - table.cdf.begin());
        digits[i - 1] = std::min<std::uint64_t>(a, spec.M);
        break;
      }
      case PositionRole::special_digit:
        digits[i - 1] = p.first + stream.below(i, p.last - p.first + 1);
        break;
      case PositionRole::filler_ones:
        digits[i - 1] = 1;
        break;
    }
  }
  return digits;
}

bool cantor_leaf_in_target(const SystemSpec& sys, const TargetSpec& target,
                           const CantorSpec& spec, const std::vector<std::uint64_t>& digits) {
  validate_cantor(sys, target, spec);
  const double logB = std::log(target.B);
  for (std::uint64_t level : spec.levels) {
    Kahan sum;
    for (std::size_t m = 0; m < target.k(); ++m) {
      const std::uint64_t pos = level + target.positions[m];
      if (pos > digits.size()) return false;
      sum.add(target.weights[m] * std::log(double(digits[pos - 1])));
    }
    if (sum.sum < double(level) * logB - kLogGuard) return false;
  }
  return true;
}

double cantor_ball_mass(const SystemSpec& sys, const TargetSpec& target, const CantorSpec& spec,
                        const BigRat& lo, const BigRat& hi) {
  validate_cantor(sys, target, spec);
  require_lueroth(sys, "the exact interval walk");
  if (!(lo < hi)) return 0.0;
  const PositionLayout lay = build_layout(sys, target, spec);
  const FreeTable table = build_free_table(sys, spec);
  BallWalk walk{lay, table, std::max(BigRat(0), lo), std::min(BigRat(1), hi)};
  if (!(walk.lo < walk.hi)) return 0.0;
  return walk.run(1, BigRat(0), BigRat(1), 1.0);
}

LocalDimStats local_dimension_sample(const SystemSpec& sys, const TargetSpec& target,
                                     const CantorSpec& spec, std::size_t samples,
                                     std::uint64_t seed) {
  validate_cantor(sys, target, spec);
  require_lueroth(sys, "the exact interval walk");
  if (samples == 0) throw ConfigError("sample count must be positive");
  const PositionLayout lay = build_layout(sys, target, spec);
  const FreeTable table = build_free_table(sys, spec);
  const std::uint64_t N = lay.boundary;
  const std::uint64_t i1 = target.positions.front();
  const std::uint64_t ik = target.positions.back();

  const std::uint64_t n1 = spec.levels.front();
  const std::size_t per_sample = std::size_t(N - n1 + 1);
  std::vector<LocalDimRow> rows(samples * per_sample);
  const SplitRng root(seed);

  const auto run_sample = [&](std::size_t sample) {
    const std::vector<std::uint64_t> digits =
        cantor_sample_leaf(sys, target, spec, root.child(sample));
    std::vector<BigRat> off(N + 1), sc(N + 1);
    off[0] = 0;
    sc[0] = 1;
    for (std::uint64_t i = 1; i <= N; ++i) {
      off[i] = off[i - 1];
      sc[i] = sc[i - 1];
      push_lueroth_exact(off[i], sc[i], digits[i - 1]);
    }
    const BigRat center = off[N] + sc[N] / 2;
    const double x = to_double(center);
    for (std::uint64_t n = n1; n <= N; ++n) {
      const BigRat half = sc[n] / 2;
      BallWalk walk{lay, table, std::max(BigRat(0), BigRat(center - half)),
                    std::min(BigRat(1), BigRat(center + half))};
      const double mu = walk.run(1, BigRat(0), BigRat(1), 1.0);
      const double ratio = std::log(mu) / log_rat(sc[n]);
      int label = 3;
      if (n + 1 <= n1 + i1) {
        label = 1;
      } else {
        for (std::uint64_t level : spec.levels) {
          if (n + 1 >= level + i1 && n <= level + ik) {
            label = 2;
            break;
          }
        }
      }
      rows[sample * per_sample + std::size_t(n - n1)] =
          {x, to_double(sc[n]), ratio, label, std::uint32_t(n)};
    }
  };

  // Samples are independent streams, so any schedule gives the same rows.
  const unsigned workers =
      std::min<unsigned>({std::max(1u, std::thread::hardware_concurrency()), 8u,
                          unsigned(std::min<std::size_t>(samples, 8))});
  if (workers <= 1) {
    for (std::size_t sample = 0; sample < samples; ++sample) run_sample(sample);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < samples; i = next.fetch_add(1))
          run_sample(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  LocalDimStats stats;
  stats.min_ratio = std::numeric_limits<double>::infinity();
  Kahan mean;
  for (const LocalDimRow& row : rows) {
    stats.min_ratio = std::min(stats.min_ratio, row.ratio);
    mean.add(row.ratio);
  }
  stats.mean_ratio = mean.sum / double(rows.size());
  stats.rows = std::move(rows);
  return stats;
}

double natural_cover_exponent(const SystemSpec& sys, const TargetSpec& target,
                              const CantorSpec& spec) {
  validate_cantor(sys, target, spec);
  require_lueroth(sys, "the stage-length sum");
  if (spec.levels.size() < 2) {
    throw ValidationError("natural-cover exponent needs two realized stages");
  }
  const std::size_t J = spec.levels.size();
  const std::uint64_t N_prev = cantor_stage_boundary(target, spec, J - 1);
  const std::uint64_t N_last = cantor_stage_boundary(target, spec, J);
  const PositionLayout lay = build_layout(sys, target, spec);

  // Per-level growth of the stage-wise length sum sum |C|^sigma between the
  // last two boundaries.  The sum factorizes over positions (free blocks
  // give Z_M(sigma), special positions an exact digit-weight tail
  // difference, fillers the digit-1 weight), so only the increment between
  // the boundaries enters the ratio.
  const auto growth = [&](double sigma) {
    Kahan z;
    for (std::uint64_t a = 1; a <= spec.M; ++a) {
      z.add(std::pow(branch_length(sys, a), sigma));
    }
    Kahan lc;
    for (std::uint64_t i = N_prev + 1; i <= N_last; ++i) {
      const PositionInfo& p = lay.info[i];
      switch (p.role) {
        case PositionRole::free_block:
          lc.add(std::log(z.sum));
          break;
        case PositionRole::special_digit:
          lc.add(std::log(lueroth_tail_sum(sigma, double(p.first)) -
                          lueroth_tail_sum(sigma, double(p.last) + 1)));
          break;
        case PositionRole::filler_ones:
          lc.add(sigma * std::log(0.5));
          break;
      }
    }
    return lc.sum / double(N_last - N_prev);
  };

  double lo = 1.0 / sys.d + 1e-6, hi = 1.5;
  if (!(growth(lo) > 0) || !(growth(hi) < 0)) {
    throw ValidationError("no natural-cover exponent inside the bisection window");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (growth(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ifsdim
