#include "ifsdim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ifsdim/errors.hpp"
#include "ifsdim/rng.hpp"

namespace ifsdim {

namespace {

// Shared dyadic denominator exponent for powerlaw weights: every weight is
// a double (hence mantissa * 2^e with e >= -1074), so scaling by 2^1140
// makes all numerators integers with headroom.
constexpr int kPowShift = 1140;

// Integer numerator of double v over the 2^kPowShift denominator.
BigInt dyadic_numerator(double v) {
  int e = 0;
  double m = std::frexp(v, &e);
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));  // exact
  int shift = kPowShift + e - 53;
  if (shift < 0) throw NumericError("powerlaw weight underflows the shared dyadic scale");
  return BigInt(mant) << shift;
}

void validate_word(const SystemSpec& sys, const Word& w, bool allow_empty = false) {
  if (!allow_empty && w.digits.empty()) throw ConfigError("invalid word: empty");
  if (w.digits.size() > SystemSpec::kMaxWordLen)
    throw SizeCapError("invalid word: length exceeds cap 64");
  for (auto a : w.digits) {
    if (a == 0) throw ConfigError("invalid word: digit 0");
    if (a > sys.max_query_digit())
      throw ConfigError("invalid word: digit exceeds alphabet bound");
  }
}

}  // namespace

struct PowerlawTables {
  double d = 2.0;
  BigInt norm_numerator;  // sum of dyadic numerators over 1..kNormTruncation
  double norm = 0;        // the same sum, correctly rounded to double
};

std::string kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::gauss: return "gauss";
    case SystemKind::lueroth: return "lueroth";
    case SystemKind::powerlaw: return "power";
  }
  return "?";
}

SystemKind kind_from_name(const std::string& name) {
  if (name == "gauss") return SystemKind::gauss;
  if (name == "lueroth") return SystemKind::lueroth;
  if (name == "power" || name == "powerlaw") return SystemKind::powerlaw;
  throw ConfigError("unknown system kind '" + name + "' (expected gauss|lueroth|power)");
}

SystemSpec make_gauss(std::uint64_t M) {
  if (M > SystemSpec::kMaxDigitQuery)
    throw ConfigError("alphabet truncation exceeds the digit cap");
  SystemSpec s;
  s.kind = SystemKind::gauss;
  s.d = 2.0;
  s.M = M;
  return s;
}

SystemSpec make_lueroth(std::uint64_t M) {
  if (M > SystemSpec::kMaxDigitQuery)
    throw ConfigError("alphabet truncation exceeds the digit cap");
  SystemSpec s;
  s.kind = SystemKind::lueroth;
  s.d = 2.0;
  s.M = M;
  return s;
}

SystemSpec make_powerlaw(double d, std::uint64_t M) {
  if (!(d > 1.0)) throw ConfigError("powerlaw decay exponent must satisfy d > 1");
  if (M > SystemSpec::kNormTruncation)
    throw ConfigError("powerlaw alphabet truncation exceeds the normalization truncation");
  SystemSpec s;
  s.kind = SystemKind::powerlaw;
  s.d = d;
  s.M = M;
  auto t = std::make_shared<PowerlawTables>();
  t->d = d;
  BigInt acc = 0;
  double acc_d = 0, comp = 0;  // Kahan for the double mirror
  for (std::uint64_t a = 1; a <= SystemSpec::kNormTruncation; ++a) {
    double w = std::pow(double(a), -d);
    acc += dyadic_numerator(w);
    double y = w - comp, t2 = acc_d + y;
    comp = (t2 - acc_d) - y;
    acc_d = t2;
  }
  t->norm_numerator = std::move(acc);
  t->norm = to_double(BigRat(t->norm_numerator, BigInt(1) << kPowShift));
  s.tables = std::move(t);
  return s;
}

SystemSpec make_system(SystemKind kind, double d, std::uint64_t M) {
  switch (kind) {
    case SystemKind::gauss: return make_gauss(M);
    case SystemKind::lueroth: return make_lueroth(M);
    case SystemKind::powerlaw: return make_powerlaw(d, M);
  }
  throw ConfigError("unknown system kind");
}

double zeta_digit(const SystemSpec& sys, std::uint64_t a) {
  if (a == 0) throw ConfigError("digit 0 has no branch");
  switch (sys.kind) {
    case SystemKind::gauss: return 1.0 / (double(a + 1) * double(a + 1));
    case SystemKind::lueroth: return 1.0 / (double(a) * double(a + 1));
    case SystemKind::powerlaw:
      return std::pow(double(a), -sys.d) / sys.tables->norm;
  }
  return 0;
}

double lambda_digit(const SystemSpec& sys, std::uint64_t a) {
  if (sys.kind == SystemKind::gauss) return 1.0 / (double(a) * double(a));
  return zeta_digit(sys, a);  // affine: constant derivative
}

double branch_length(const SystemSpec& sys, std::uint64_t a) {
  if (sys.kind == SystemKind::gauss) return 1.0 / (double(a) * double(a + 1));
  return zeta_digit(sys, a);
}

double k1_constant(const SystemSpec& sys) {
  const std::uint64_t top = sys.max_query_digit();
  switch (sys.kind) {
    case SystemKind::gauss:
      // zeta_a * a^2 = (a/(a+1))^2 is increasing in a: minimum at a=1.
      return 0.25;
    case SystemKind::lueroth:
      // zeta_a * a^2 = a/(a+1), increasing: minimum at a=1.
      return 0.5;
    case SystemKind::powerlaw: {
      double mn = 1e300;
      for (std::uint64_t a = 1; a <= top; ++a)
        mn = std::min(mn, std::pow(double(a), -sys.d) / sys.tables->norm * std::pow(double(a), sys.d));
      return mn;
    }
  }
  return 0;
}

double k2_constant(const SystemSpec& sys) {
  const std::uint64_t top = sys.max_query_digit();
  switch (sys.kind) {
    case SystemKind::gauss:
      return 1.0;  // lambda_a * a^2 == 1 for every digit
    case SystemKind::lueroth:
      // lambda_a * a^2 = a/(a+1), increasing: maximum at the top digit
      // (supremum 1 for the full alphabet).
      return sys.full_alphabet() ? 1.0 : double(sys.M) / double(sys.M + 1);
    case SystemKind::powerlaw: {
      double mx = 0;
      for (std::uint64_t a = 1; a <= top; ++a)
        mx = std::max(mx, std::pow(double(a), -sys.d) / sys.tables->norm * std::pow(double(a), sys.d));
      return mx;
    }
  }
  return 0;
}

std::pair<int, double> contraction_certificate(const SystemSpec& sys) {
  if (sys.affine()) {
    // Constant derivative per branch; the largest is digit 1's.
    double h = lambda_digit(sys, 1);
    if (!(h < 1.0)) throw NumericError("level-1 contraction bound not below 1");
    return {1, h};
  }
  // gauss: level 1 fails (sup |T_1'| = 1); level 2 composition has
  // sup |T_ab'| = 1/(ab+1)^2, maximized at a=b=1.
  double h = 0;
  const std::uint64_t top = std::min<std::uint64_t>(sys.max_query_digit(), 8);
  for (std::uint64_t a = 1; a <= top; ++a)
    for (std::uint64_t b = 1; b <= top; ++b)
      h = std::max(h, 1.0 / (double(a * b + 1) * double(a * b + 1)));
  if (!(h < 1.0)) throw NumericError("level-2 contraction bound not below 1");
  return {2, h};
}

std::string Word::joined() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i) os << '/';
    os << digits[i];
  }
  return os.str();
}

namespace detail {

void AffineComp::push_lueroth(std::uint64_t a) {
  // T_a(y) = (y+a)/(a(a+1)) = 1/(a+1) + y/(a(a+1))
  BigInt aa(a);
  offset += scale / BigRat(aa + 1);
  scale /= BigRat(aa * (aa + 1));
}

void powerlaw_branch(const SystemSpec& sys, std::uint64_t a, BigRat& lo, BigRat& width) {
  const auto& t = *sys.tables;
  BigInt prefix = 0;  // sum of weight numerators for digits 1..a
  BigInt own = 0;
  for (std::uint64_t j = 1; j <= a; ++j) {
    BigInt n = dyadic_numerator(std::pow(double(j), -t.d));
    prefix += n;
    if (j == a) own = std::move(n);
  }
  // C[a] = [1 - r_a/Z, 1 - r_{a-1}/Z): digit 1 owns the rightmost branch.
  lo = BigRat(t.norm_numerator - prefix, t.norm_numerator);
  width = BigRat(own, t.norm_numerator);
}

void AffineComp::push_powerlaw(const SystemSpec& sys, std::uint64_t a) {
  BigRat lo, w;
  powerlaw_branch(sys, a, lo, w);
  offset += scale * lo;
  scale *= w;
}

double powerlaw_norm_double(const SystemSpec& sys) { return sys.tables->norm; }

}  // namespace detail

CylinderInterval cylinder_interval(const SystemSpec& sys, const Word& w) {
  validate_word(sys, w);
  CylinderInterval out;
  out.word = w;
  if (sys.kind == SystemKind::gauss) {
    detail::Continuants c;
    for (auto a : w.digits) c.push(a);
    BigRat end0(c.p, c.q);                          // T_w(0)
    BigRat end1(c.p_prev + c.p, c.q_prev + c.q);    // T_w(1)
    out.orientation = (w.digits.size() % 2 == 0) ? +1 : -1;
    out.lo = std::min(end0, end1);
    out.hi = std::max(end0, end1);
    BigInt qsum = c.q + c.q_prev;
    out.length = BigRat(1, c.q * qsum);  // |det| = 1 for continuant matrices
    out.log_length = -(log_bigint(c.q) + log_bigint(qsum));
    // |T_w'(y)| = 1/(q_prev*y + q)^2, monotone in y.
    out.log_deriv_min = -2.0 * log_bigint(qsum);
    out.log_deriv_max = -2.0 * log_bigint(c.q);
  } else {
    detail::AffineComp comp;
    for (auto a : w.digits) {
      if (sys.kind == SystemKind::lueroth)
        comp.push_lueroth(a);
      else
        comp.push_powerlaw(sys, a);
    }
    out.orientation = +1;
    out.lo = comp.offset;
    out.hi = comp.offset + comp.scale;
    out.length = comp.scale;
    out.log_length = log_rat(comp.scale);
    out.log_deriv_min = out.log_deriv_max = out.log_length;
  }
  if (!(out.lo < out.hi)) throw NumericError("degenerate cylinder interval");
  return out;
}

TailUnion tail_union(const SystemSpec& sys, const Word& w) {
  validate_word(sys, w);
  const std::uint64_t cutoff = w.digits.back();
  const std::uint64_t top = sys.max_query_digit();
  if (cutoff > top) throw ConfigError("tail union cutoff exceeds alphabet bound");

  Word prefix;
  prefix.digits.assign(w.digits.begin(), w.digits.end() - 1);

  auto child = [&](std::uint64_t digit) {
    Word cw = prefix;
    cw.digits.push_back(digit);
    return cylinder_interval(sys, cw);
  };

  // Sibling cylinders are contiguous and monotone in the digit, so the hull
  // over a digit range is spanned by the two extreme children.
  CylinderInterval first = child(cutoff);
  CylinderInterval last = child(top);

  TailUnion out;
  out.word = w;
  out.lo = std::min(first.lo, last.lo);
  out.hi = std::max(first.hi, last.hi);

  // Limit of the far edge as the digit grows: the branch images shrink
  // toward T_prefix(0) for all three families.
  if (sys.kind == SystemKind::gauss) {
    detail::Continuants c;
    for (auto a : prefix.digits) c.push(a);
    out.limit_endpoint = BigRat(c.p, c.q);
  } else {
    detail::AffineComp comp;
    for (auto a : prefix.digits) {
      if (sys.kind == SystemKind::lueroth)
        comp.push_lueroth(a);
      else
        comp.push_powerlaw(sys, a);
    }
    out.limit_endpoint = comp.offset;
  }
  out.lo_full = std::min(out.lo, out.limit_endpoint);
  out.hi_full = std::max(out.hi, out.limit_endpoint);
  return out;
}

namespace {

constexpr double kExpandTol = 1e-9;

// Digit of y under the level-1 partition shared by gauss and lueroth:
// y in [1/(a+1), 1/a) -> a, i.e. a = ceil(1/y) - 1 (ties to the right
// cylinder, which is the smaller digit).
std::uint64_t reciprocal_digit(double y) {
  double r = 1.0 / y;
  // Boundary points take the right cylinder (the smaller digit); snap r so
  // orbit rounding noise cannot push a boundary point across it.
  const double nearest = std::nearbyint(r);
  if (nearest > 0 && std::abs(r - nearest) <= 1e-12 * nearest) r = nearest;
  auto a = static_cast<std::uint64_t>(std::ceil(r));
  // Guard against ceil landing one off for r within rounding of an integer.
  if (double(a) - r >= 1.0) --a;
  return a - 1;
}

}  // namespace

Expansion expand(const SystemSpec& sys, double x, std::size_t max_digits) {
  if (!(x >= 0.0) || !(x < 1.0)) throw ConfigError("expand: point outside [0,1)");
  Expansion out;
  double y = x;
  while (out.digits.size() < max_digits) {
    if (y <= kExpandTol || y >= 1.0 - kExpandTol) {
      out.hit_endpoint = true;
      return out;
    }
    std::uint64_t a = 0;
    double next = 0;
    if (sys.kind == SystemKind::powerlaw) {
      const double target = 1.0 - y;  // distance from the right end
      double cum = 0;
      const std::uint64_t top = sys.max_query_digit();
      for (a = 1; a <= top; ++a) {
        cum += branch_length(sys, a);
        if (cum >= target - kExpandTol) break;
      }
      if (a > top) {
        out.outside_alphabet = true;
        return out;
      }
      const double w = branch_length(sys, a);
      next = (y - (1.0 - cum)) / w;
    } else {
      a = reciprocal_digit(y);
      if (a > sys.max_query_digit()) {
        out.outside_alphabet = true;
        return out;
      }
      next = (sys.kind == SystemKind::gauss) ? 1.0 / y - double(a)
                                             : double(a) * double(a + 1) * y - double(a);
    }
    out.digits.push_back(a);
    y = std::clamp(next, 0.0, 1.0);
  }
  return out;
}

Expansion expand(const SystemSpec& sys, const BigRat& x, std::size_t max_digits) {
  if (x < 0 || x >= 1) throw ConfigError("expand: point outside [0,1)");
  Expansion out;
  BigRat y = x;
  while (out.digits.size() < max_digits) {
    if (y == 0 || y == 1) {
      out.hit_endpoint = true;
      return out;
    }
    std::uint64_t a = 0;
    if (sys.kind == SystemKind::powerlaw) {
      const std::uint64_t top = sys.max_query_digit();
      const BigInt& Z = sys.tables->norm_numerator;
      // target in numerator units: digit a is the first with r_a/Z >= 1-y
      const BigRat target = (1 - y) * BigRat(Z);
      BigInt prefix = 0, own = 0;
      for (a = 1; a <= top; ++a) {
        own = dyadic_numerator(std::pow(double(a), -sys.tables->d));
        prefix += own;
        if (BigRat(prefix) >= target) break;
      }
      if (a > top) {
        out.outside_alphabet = true;
        return out;
      }
      const BigRat lo(Z - prefix, Z);
      y = (y - lo) / BigRat(own, Z);
    } else {
      // a = ceil(1/y) - 1, computed exactly.
      BigInt num = numerator(y), den = denominator(y);
      BigInt q = den / num, r = den % num;
      BigInt ceil_val = (r == 0) ? q : q + 1;
      a = ceil_val.convert_to<std::uint64_t>() - 1;
      if (a > sys.max_query_digit()) {
        out.outside_alphabet = true;
        return out;
      }
      if (sys.kind == SystemKind::gauss)
        y = BigRat(den, num) - BigRat(BigInt(a));
      else
        y = BigRat(BigInt(a) * BigInt(a + 1)) * y - BigRat(BigInt(a));
    }
    out.digits.push_back(a);
  }
  return out;
}

double word_distortion(const SystemSpec& sys, const Word& w) {
  if (sys.affine()) return 0.0;
  detail::Continuants c;
  for (auto a : w.digits) c.push(a);
  // log(sup/inf of |T_w'|) = 2 log((q + q_prev)/q) <= 2 log 2.
  return 2.0 * (log_bigint(c.q + c.q_prev) - log_bigint(c.q));
}

DistortionReport distortion_report(const SystemSpec& sys, std::size_t n_max,
                                   std::size_t samples_per_level, std::uint64_t seed) {
  if (n_max < 1) throw ConfigError("distortion report needs depth >= 1");
  if (n_max > SystemSpec::kMaxWordLen) throw SizeCapError("distortion depth exceeds word cap");
  const std::uint64_t top = sys.max_query_digit();
  SplitRng rng = SplitRng(seed).child(0x5D15);
  DistortionReport rep;
  for (std::size_t n = 1; n <= n_max; ++n) {
    SplitRng level = rng.child(n);
    DistortionRow row;
    row.n = n;
    row.words = samples_per_level;
    double sum = 0;
    for (std::size_t i = 0; i < samples_per_level; ++i) {
      Word w;
      w.digits.reserve(n);
      for (std::size_t j = 0; j < n; ++j)
        w.digits.push_back(1 + level.below(i * n + j, top));
      double dist = word_distortion(sys, w);
      row.max_distortion = std::max(row.max_distortion, dist);
      sum += dist;
    }
    row.mean_distortion = samples_per_level ? sum / double(samples_per_level) : 0.0;
    rep.per_level.push_back(row);
  }
  return rep;
}

double distortion_ceiling(const SystemSpec& sys) {
  return sys.kind == SystemKind::gauss ? 2.0 * 0.6931471805599453 : 0.0;
}

}  // namespace ifsdim
