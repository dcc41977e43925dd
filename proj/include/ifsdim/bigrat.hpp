#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>

namespace ifsdim {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline double to_double(const BigRat& r) { return r.convert_to<double>(); }

// Exact dyadic rational equal to the double bit pattern (x must be finite).
inline BigRat rat_of_double(double x) {
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));  // exact
  BigRat r(mant);
  int shift = e - 53;
  if (shift >= 0) {
    r *= BigRat(BigInt(1) << shift);
  } else {
    r /= BigRat(BigInt(1) << -shift);
  }
  return r;
}

// log of a positive BigInt without overflowing double (values can exceed
// 10^300 for deep cylinder denominators).
inline double log_bigint(const BigInt& v) {
  const std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 62) return std::log(v.convert_to<double>());
  const std::size_t drop = bits - 62;
  const BigInt top = v >> drop;
  return std::log(top.convert_to<double>()) + double(drop) * 0.6931471805599453;
}

// log of a positive rational, safe for huge numerators/denominators.
inline double log_rat(const BigRat& r) {
  return log_bigint(numerator(r)) - log_bigint(denominator(r));
}

inline BigRat pow_rat(BigRat base, unsigned n) {
  BigRat acc(1);
  while (n > 0) {
    if (n & 1u) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

}  // namespace ifsdim
