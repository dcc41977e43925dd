#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ifsdim/errors.hpp"
#include "ifsdim/weight_program.hpp"

namespace ifsdim {

// Limsup-set parameters: the digit positions i_1 < ... < i_k watched inside
// each block, their exponent weights t_1..t_k, and the threshold base B of
// the digit-product condition prod_m a_{n+i_m}^{t_m} >= B^n.
struct TargetSpec {
  std::vector<std::uint32_t> positions;  // strictly increasing block offsets
  std::vector<double> weights;           // t_1..t_k, all positive
  double B = 2.0;

  std::size_t k() const { return weights.size(); }
};

inline void validate_target(const TargetSpec& t) {
  if (t.weights.empty()) throw ConfigError("target needs at least one special position");
  if (t.weights.size() > kMaxPositions)
    throw ConfigError("target caps special positions at 16");
  if (t.positions.size() != t.weights.size())
    throw ConfigError("target positions and weights must have matching lengths");
  for (std::size_t j = 0; j + 1 < t.positions.size(); ++j)
    if (t.positions[j] >= t.positions[j + 1])
      throw ConfigError("target positions must be strictly increasing");
  for (double w : t.weights)
    if (!(w > 0) || !std::isfinite(w)) throw ConfigError("target weights must be positive");
  if (!(t.B > 1.0) || !std::isfinite(t.B))
    throw ConfigError("target threshold base must satisfy B > 1");
}

// Convenience builder: positions default to 0,1,...,k-1 when omitted.
inline TargetSpec make_target(std::vector<double> weights, double B,
                              std::vector<std::uint32_t> positions = {}) {
  TargetSpec t;
  if (positions.empty())
    for (std::uint32_t j = 0; j < weights.size(); ++j) positions.push_back(j);
  t.positions = std::move(positions);
  t.weights = std::move(weights);
  t.B = B;
  validate_target(t);
  return t;
}

}  // namespace ifsdim
