#pragma once

#include <cstdint>

namespace ifsdim {

// Counter-based splittable generator built on the splitmix64 finalizer.
// Draw i of a stream is a pure function of (key, i), so concurrent
// consumers can index into disjoint streams and results never depend on
// scheduling.  All sampling in the library derives from one user seed
// through `child` tags, which keeps every output byte reproducible.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed + kGamma)) {}

  // Independent child stream; tag values are call-site constants.
  SplitRng child(std::uint64_t tag) const {
    return SplitRng(mix(key_ ^ (kGamma * (tag + 1))));
  }

  // i-th 64-bit draw of this stream (stateless).
  std::uint64_t bits(std::uint64_t i) const { return mix(key_ + kGamma * (i + 1)); }

  // i-th draw mapped to [0,1) with 53 random bits.
  double unit(std::uint64_t i) const { return double(bits(i) >> 11) * 0x1.0p-53; }

  // i-th draw mapped to {0,...,n-1} without modulo bias (fixed-point scale;
  // bias < 2^-64 is irrelevant for n << 2^32 and keeps the draw O(1)).
  std::uint64_t below(std::uint64_t i, std::uint64_t n) const {
    return std::uint64_t((unsigned __int128)(bits(i)) * n >> 64);
  }

  // Stateful convenience wrappers advancing an internal counter.
  std::uint64_t next() { return bits(counter_++); }
  double next_unit() { return unit(counter_++); }
  std::uint64_t next_below(std::uint64_t n) { return below(counter_++, n); }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ifsdim
