#include "ifsdim/pressure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "ifsdim/errors.hpp"

namespace ifsdim {

namespace {

struct Kahan {
  double sum = 0, c = 0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

constexpr double kSeriesDirectCut = 3000;  // direct summation below, EM tail above

void require_series_domain(double s) {
  if (!(s > 0.5 + 1e-9))
    throw ConfigError("series pressure needs s > 1/d (the digit-weight series diverges)");
}

// Integral of (x(x+1))^(-s) from N to infinity via the binomial expansion
// (x^2+x)^(-s) = sum_j C(-s,j) x^(-2s-j).
double lueroth_tail_integral(double s, double N) {
  double coef = 1.0;  // C(-s, 0)
  double acc = 0;
  for (int j = 0; j < 24; ++j) {
    if (j > 0) coef *= (-s - double(j - 1)) / double(j);
    acc += coef * std::pow(N, 1.0 - 2.0 * s - double(j)) / (2.0 * s - 1.0 + double(j));
  }
  return acc;
}

std::uint64_t checked_leaf_count(std::uint64_t M, std::size_t n) {
  std::uint64_t leaves = 1;
  for (std::size_t i = 0; i < n; ++i) {
    // M <= 1e6 and an already-over-cap count short-circuits, so no overflow
    if (leaves > kPartitionLeafCap) return leaves;
    leaves *= M;
  }
  return leaves;
}

// Distortion sandwich for the partition value: the word sum of digit
// products factorizes exactly, so the bracket is s*log K + log sum a^(-ds).
void distortion_bracket(const SystemSpec& sys, double s, double value, double& lo, double& hi) {
  const double ds = sys.d * s;
  double digit_sum;
  if (sys.kind == SystemKind::powerlaw) {
    // the normalization itself stops at kNormTruncation, so the digit sum is finite
    const std::uint64_t top = sys.full_alphabet() ? SystemSpec::kNormTruncation : sys.M;
    Kahan k;
    for (std::uint64_t a = 1; a <= top; ++a) k.add(std::pow(double(a), -ds));
    digit_sum = k.sum;
  } else if (sys.full_alphabet()) {
    if (!(ds > 1.0 + 1e-9)) {
      lo = -std::numeric_limits<double>::infinity();
      hi = std::numeric_limits<double>::infinity();
      return;
    }
    digit_sum = power_tail_sum(ds, 1.0);
  } else {
    Kahan k;
    for (std::uint64_t a = 1; a <= sys.M; ++a) k.add(std::pow(double(a), -ds));
    digit_sum = k.sum;
  }
  const double base = std::log(digit_sum);
  lo = s * std::log(k1_constant(sys)) + base;
  hi = s * std::log(k2_constant(sys)) + base;
  // Guard against rounding putting the exact value a hair outside.
  lo = std::min(lo, value);
  hi = std::max(hi, value);
}

// Deterministic sharded enumeration of gauss word sums: shard by leading
// digit; each shard is summed sequentially in lexicographic order, shards
// are combined in digit order, so totals do not depend on thread count or
// scheduling.  (Affine kinds never enumerate: their word sums factorize.)
std::vector<double> enumerate_partition(const SystemSpec& sys, std::size_t n,
                                        const std::vector<double>& s_values) {
  const std::uint64_t M = sys.M;
  const std::size_t ns = s_values.size();
  std::vector<std::vector<double>> shard_sums(M, std::vector<double>(ns, 0.0));

  auto run_shard = [&](std::uint64_t first_digit) {
    std::vector<Kahan> acc(ns);
    // Continuant pair (q_prev, q) per depth; exact in double for every
    // alphabet fitting the leaf cap ((M+1)^n < 2^53).
    std::vector<double> qp(n + 1), qc(n + 1);
    std::vector<std::uint64_t> digit(n + 1, 0);
    qp[0] = 0;
    qc[0] = 1;
    // depth 1 fixed to the shard's leading digit
    qp[1] = 1;
    qc[1] = double(first_digit);
    std::size_t depth = 1;
    digit[1] = first_digit;
    while (true) {
      if (depth == n) {
        const double ll = -(std::log(qc[depth]) + std::log(qc[depth] + qp[depth]));
        for (std::size_t i = 0; i < ns; ++i) acc[i].add(std::exp(s_values[i] * ll));
        // backtrack to the deepest level below n with digits remaining
        while (depth > 1 && digit[depth] == M) --depth;
        if (depth == 1) break;
        ++digit[depth];
        qp[depth] = qc[depth - 1];
        qc[depth] = double(digit[depth]) * qc[depth - 1] + qp[depth - 1];
      } else {
        ++depth;
        digit[depth] = 1;
        qp[depth] = qc[depth - 1];
        qc[depth] = qc[depth - 1] + qp[depth - 1];
      }
    }
    for (std::size_t i = 0; i < ns; ++i) shard_sums[first_digit - 1][i] = acc[i].sum;
  };

  if (n == 1) {
    // Single level: one shard suffices and avoids per-digit threads.
    std::vector<Kahan> acc(ns);
    for (std::uint64_t a = 1; a <= M; ++a) {
      const double ll = std::log(branch_length(sys, a));
      for (std::size_t i = 0; i < ns; ++i) acc[i].add(std::exp(s_values[i] * ll));
    }
    std::vector<double> out(ns);
    for (std::size_t i = 0; i < ns; ++i) out[i] = acc[i].sum;
    return out;
  }

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = unsigned(std::min<std::uint64_t>({M, hw, 32}));
  std::atomic<std::uint64_t> next{1};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::uint64_t a = next.fetch_add(1); a <= M; a = next.fetch_add(1)) run_shard(a);
    });
  for (auto& t : pool) t.join();

  std::vector<double> out(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    Kahan total;
    for (std::uint64_t a = 0; a < M; ++a) total.add(shard_sums[a][i]);
    out[i] = total.sum;
  }
  return out;
}

}  // namespace

std::string method_name(PressureMethod m) {
  switch (m) {
    case PressureMethod::exact_partition: return "exact-partition";
    case PressureMethod::transfer_eigenvalue: return "transfer-eigenvalue";
    case PressureMethod::tail_extrapolated: return "tail-extrapolated";
  }
  return "?";
}

double power_tail_sum(double x, double c) {
  if (!(x > 1.0 + 1e-9)) throw ConfigError("power tail sum needs exponent > 1");
  if (!(c >= 1.0)) throw ConfigError("power tail sum needs start >= 1");
  Kahan direct;
  double N = c;
  if (c < kSeriesDirectCut) {
    for (double a = c; a < kSeriesDirectCut; ++a) direct.add(std::pow(a, -x));
    N = kSeriesDirectCut;
  }
  // sum over a >= N of a^(-x) = integral + f(N)/2 - f'(N)/12 - ...
  const double f = std::pow(N, -x);
  const double fp = -x * std::pow(N, -x - 1.0);
  direct.add(std::pow(N, 1.0 - x) / (x - 1.0) + f / 2.0 - fp / 12.0);
  return direct.sum;
}

double lueroth_tail_sum(double s, double c) {
  require_series_domain(s);
  if (!(c >= 1.0)) throw ConfigError("digit tail sum needs start >= 1");
  Kahan direct;
  double N = c;
  if (c < kSeriesDirectCut) {
    for (double a = c; a < kSeriesDirectCut; ++a) direct.add(std::pow(a * (a + 1.0), -s));
    N = kSeriesDirectCut;
  }
  const double f = std::pow(N * (N + 1.0), -s);
  const double fp = -s * (2.0 * N + 1.0) * std::pow(N * N + N, -s - 1.0);
  // sum over a >= N = integral - (-f/2) ... : sum_{a>=N} = I + f/2 - f'/12,
  // and we want digits >= N exactly, so the first lattice point is N itself.
  direct.add(lueroth_tail_integral(s, N) + f / 2.0 - fp / 12.0);
  return direct.sum;
}

double level1_weight_sum(const SystemSpec& sys, double s) {
  if (sys.full_alphabet()) {
    if (sys.kind == SystemKind::powerlaw) {
      Kahan k;
      const double Z = detail::powerlaw_norm_double(sys);
      for (std::uint64_t a = 1; a <= SystemSpec::kNormTruncation; ++a)
        k.add(std::pow(std::pow(double(a), -sys.d) / Z, s));
      return k.sum;
    }
    return lueroth_tail_sum(s, 1.0);  // gauss level-1 lengths match lueroth's
  }
  Kahan k;
  for (std::uint64_t a = 1; a <= sys.M; ++a) k.add(std::pow(branch_length(sys, a), s));
  return k.sum;
}

std::vector<PressureEstimate> partition_sum_multi(const SystemSpec& sys, std::size_t n,
                                                  const std::vector<double>& s_values) {
  if (n < 1) throw ConfigError("partition sum needs level n >= 1");
  for (double s : s_values)
    if (!(s > 1.0 / sys.d - 0.2))
      throw ConfigError("partition sum guard: s must exceed 1/d - 0.2");

  std::vector<PressureEstimate> out;
  out.reserve(s_values.size());

  if (sys.full_alphabet()) {
    // Affine full alphabets (and the level-1 gauss sum, whose cylinder
    // lengths coincide with lueroth's) have n-independent values.
    if (sys.kind == SystemKind::gauss && n > 1)
      throw ConfigError("full-alphabet gauss partition sums need a finite truncation");
    for (double s : s_values) {
      PressureEstimate e;
      e.s = s;
      e.M = kFullAlphabet;
      e.method = PressureMethod::exact_partition;
      e.n = n;
      e.value = std::log(level1_weight_sum(sys, s));
      distortion_bracket(sys, s, e.value, e.lo, e.hi);
      out.push_back(e);
    }
    return out;
  }

  if (checked_leaf_count(sys.M, n) > kPartitionLeafCap)
    throw SizeCapError(
        "partition enumeration exceeds the leaf cap; use the transfer-eigenvalue method");

  if (sys.affine()) {
    // Constant branch derivatives factorize the word sum exactly:
    // Z_{M,n}(s) = (sum_a w_a^s)^n, so the level value is n-independent.
    for (double s : s_values) {
      PressureEstimate e;
      e.s = s;
      e.M = sys.M;
      e.method = PressureMethod::exact_partition;
      e.n = n;
      e.value = std::log(level1_weight_sum(sys, s));
      distortion_bracket(sys, s, e.value, e.lo, e.hi);
      out.push_back(e);
    }
    return out;
  }

  const std::vector<double> totals = enumerate_partition(sys, n, s_values);
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    PressureEstimate e;
    e.s = s_values[i];
    e.M = sys.M;
    e.method = PressureMethod::exact_partition;
    e.n = n;
    e.value = std::log(totals[i]) / double(n);
    if (!std::isfinite(e.value)) throw NumericError("partition sum under/overflowed");
    distortion_bracket(sys, e.s, e.value, e.lo, e.hi);
    out.push_back(e);
  }
  return out;
}

PressureEstimate partition_sum(const SystemSpec& sys, std::size_t n, double s) {
  return partition_sum_multi(sys, n, {s}).front();
}

PressureEstimate pressure_eigenvalue(const SystemSpec& sys, double s, std::size_t grid_size) {
  if (!(s > 0)) throw ConfigError("transfer eigenvalue needs s > 0");
  if (grid_size < 16) throw ConfigError("transfer grid must have at least 16 points");
  if (sys.full_alphabet())
    throw ConfigError("transfer backend needs a finite alphabet; set a truncation M");
  const std::uint64_t M = sys.M;
  const std::size_t g = grid_size;

  // powerlaw branches stack right-to-left; grid accuracy suffices here, so a
  // double prefix-sum table gives the offsets
  std::vector<double> cum;
  if (sys.kind == SystemKind::powerlaw) {
    cum.assign(M + 1, 0.0);
    Kahan k;
    for (std::uint64_t j = 1; j <= M; ++j) {
      k.add(branch_length(sys, j));
      cum[j] = k.sum;
    }
  }

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(Eigen::Index(g), Eigen::Index(g));
  for (std::uint64_t a = 1; a <= M; ++a) {
    for (std::size_t i = 0; i < g; ++i) {
      const double x = double(i) / double(g - 1);
      double t, w;
      if (sys.kind == SystemKind::gauss) {
        t = 1.0 / (double(a) + x);
        w = std::pow(t, 2.0 * s);
      } else if (sys.kind == SystemKind::lueroth) {
        const double len = branch_length(sys, a);
        t = 1.0 / double(a + 1) + x * len;
        w = std::pow(len, s);
      } else {
        const double len = branch_length(sys, a);
        t = (1.0 - cum[a]) + x * len;
        w = std::pow(len, s);
      }
      const double pos = std::clamp(t, 0.0, 1.0) * double(g - 1);
      auto j0 = std::min<std::size_t>(std::size_t(pos), g - 2);
      const double fr = pos - double(j0);
      L(Eigen::Index(i), Eigen::Index(j0)) += w * (1.0 - fr);
      L(Eigen::Index(i), Eigen::Index(j0 + 1)) += w * fr;
    }
  }

  Eigen::VectorXd v = Eigen::VectorXd::Ones(Eigen::Index(g));
  v /= v.sum();
  double lam = 0;
  bool converged = false;
  double residual = 0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd nv = L * v;
    const double nl = nv.sum();  // v sums to 1
    if (!(nl > 0) || !std::isfinite(nl))
      throw NumericError("transfer power iteration produced a non-positive eigenvalue");
    residual = std::abs(nl - lam);
    if (it > 0 && residual <= 1e-12 * std::abs(nl)) {
      lam = nl;
      converged = true;
      break;
    }
    lam = nl;
    v = nv / nl;
  }
  if (!converged)
    throw NumericError("transfer power iteration did not converge; residual " +
                       std::to_string(residual));

  PressureEstimate e;
  e.s = s;
  e.M = M;
  e.method = PressureMethod::transfer_eigenvalue;
  e.value = std::log(lam);
  Kahan zl, ll;
  for (std::uint64_t a = 1; a <= M; ++a) {
    zl.add(std::pow(zeta_digit(sys, a), s));
    ll.add(std::pow(lambda_digit(sys, a), s));
  }
  e.lo = std::min(std::log(zl.sum), e.value);
  e.hi = std::max(std::log(ll.sum), e.value);
  return e;
}

PressureEstimate pressure_series(const SystemSpec& sys, double s) {
  if (!sys.affine())
    throw ConfigError("series pressure exists for the affine kinds only");
  if (!sys.full_alphabet())
    throw ConfigError("series pressure is the full-alphabet value; use partition sums for truncations");
  if (sys.kind == SystemKind::lueroth)
    require_series_domain(s);
  else if (!(s > 0))
    throw ConfigError("series pressure needs s > 0");
  PressureEstimate e;
  e.s = s;
  e.M = kFullAlphabet;
  e.method = PressureMethod::tail_extrapolated;
  e.n = 1;
  e.value = std::log(level1_weight_sum(sys, s));
  // Series truncation error is ~1e-16 relative; report a rounding-level bracket.
  e.lo = e.value - 1e-12;
  e.hi = e.value + 1e-12;
  return e;
}

double truncation_tail_bound(const SystemSpec& sys, double s) {
  if (sys.full_alphabet()) return 0.0;
  if (!(s > 1.0 / sys.d + 1e-6))
    throw ConfigError("truncation tail bound needs s > 1/d + 1e-6");
  const double M = double(sys.M);
  // raw >= sum over dropped digits of the level-1 weight (integral bound)
  double raw;
  if (sys.kind == SystemKind::powerlaw) {
    const double ds = sys.d * s;
    const double Z = detail::powerlaw_norm_double(sys);
    raw = std::pow(M, 1.0 - ds) / ((ds - 1.0) * std::pow(Z, s));
  } else if (std::abs(s - 1.0) < 1e-12) {
    raw = 1.0 / (M + 1.0);  // exact level-1 tail length
  } else {
    raw = std::pow(M, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
  }
  if (sys.affine()) {
    // P(s) - P_M(s) = log(1 + tail/Z_M) <= raw / Z_M, with Z_M computable.
    return raw / level1_weight_sum(sys, s);
  }
  // gauss: dropping digits also re-weights the leading eigenfunction; its
  // density ratio stays below 1/log 2 < 2 on the dimension domain s <= 1,
  // so doubling the raw weight tail certifies the deficit there.
  if (s > 1.0 + 1e-9)
    throw ConfigError("truncation tail bound is certified for s <= 1 only");
  return 2.0 * raw;
}

TailExtrapolation pressure_tail_extrapolate(const SystemSpec& sys, double s,
                                            const std::vector<std::uint64_t>& M_list,
                                            std::size_t grid_size) {
  if (M_list.size() < 3) throw ConfigError("tail extrapolation needs at least 3 truncations");
  for (std::size_t i = 0; i + 1 < M_list.size(); ++i)
    if (M_list[i + 1] < M_list[i]) throw ConfigError("truncation list must be non-decreasing");
  for (auto M : M_list)
    if (M == kFullAlphabet) throw ConfigError("truncation list must be finite");

  TailExtrapolation out;
  for (auto M : M_list) {
    SystemSpec trunc = make_system(sys.kind, sys.d, M);
    PressureEstimate e = (trunc.kind == SystemKind::gauss)
                             ? pressure_eigenvalue(trunc, s, grid_size)
                             : partition_sum(trunc, 1, s);
    out.per_M.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < out.per_M.size(); ++i) {
    if (out.per_M[i + 1].value < out.per_M[i].value - 1e-5)
      throw ValidationError("truncated pressures decreased along increasing truncations");
  }
  SystemSpec last = make_system(sys.kind, sys.d, M_list.back());
  PressureEstimate fin = out.per_M.back();
  fin.method = PressureMethod::tail_extrapolated;
  fin.lo = fin.value;
  fin.hi = fin.value + truncation_tail_bound(last, s);
  out.final = fin;
  return out;
}

PressurePropertyReport pressure_properties_check(const SystemSpec& sys,
                                                 const std::vector<double>& s_grid,
                                                 std::size_t n) {
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i)
    if (!(s_grid[i] < s_grid[i + 1])) throw ConfigError("s grid must be strictly increasing");
  for (double s : s_grid)
    if (!(s > 1.0 / sys.d) || !(s <= 2.0))
      throw ConfigError("s grid must lie in (1/d, 2]");

  PressurePropertyReport rep;
  if (s_grid.empty()) return rep;

  if (sys.affine() || sys.full_alphabet()) {
    for (double s : s_grid) rep.values.push_back(std::log(level1_weight_sum(sys, s)));
  } else {
    auto ests = partition_sum_multi(sys, n, s_grid);
    for (const auto& e : ests) rep.values.push_back(e.value);
  }

  // Lipschitz ceiling |P'| <= max_w |log |C_w|| / n <= max_a (-log zeta_a).
  if (!sys.full_alphabet()) {
    rep.slope_bound = -std::log(zeta_digit(sys, sys.M));
  } else if (sys.kind == SystemKind::powerlaw) {
    rep.slope_bound = -std::log(zeta_digit(sys, SystemSpec::kNormTruncation));
  } else {
    // Full digit alphabet: |P'(s)| = sum w^s (-log w) / sum w^s, maximal at
    // the left end of the grid (P is convex decreasing).  Bound the series
    // numerator with log(a+1) <= 20 a^(1/20).
    const double s0 = s_grid.front();
    Kahan num;
    for (double a = 1; a < kSeriesDirectCut; ++a) {
      const double w = 1.0 / (a * (a + 1.0));
      num.add(std::pow(w, s0) * (-std::log(w)));
    }
    if (2.0 * s0 - 0.05 > 1.0 + 1e-9)
      num.add(40.0 * power_tail_sum(2.0 * s0 - 0.05, kSeriesDirectCut));
    else
      num.sum = std::numeric_limits<double>::infinity();
    rep.slope_bound = num.sum / level1_weight_sum(sys, s0);
  }

  for (std::size_t i = 0; i + 1 < rep.values.size(); ++i) {
    const double slope = (rep.values[i + 1] - rep.values[i]) / (s_grid[i + 1] - s_grid[i]);
    rep.max_abs_slope = std::max(rep.max_abs_slope, std::abs(slope));
    if (!(rep.values[i + 1] < rep.values[i])) {
      rep.decreasing = false;
      rep.offending_s.push_back(s_grid[i + 1]);
    }
  }
  for (std::size_t i = 1; i + 1 < rep.values.size(); ++i) {
    // second difference scaled by the (uniform-grid) step product
    const double d2 = (rep.values[i + 1] - rep.values[i]) / (s_grid[i + 1] - s_grid[i]) -
                      (rep.values[i] - rep.values[i - 1]) / (s_grid[i] - s_grid[i - 1]);
    if (d2 < -1e-9) {
      rep.convex = false;
      rep.offending_s.push_back(s_grid[i]);
    }
  }
  if (rep.max_abs_slope > rep.slope_bound + 1e-9) rep.lipschitz_ok = false;
  return rep;
}

Word SMeasureWeights::word_at(std::size_t index) const {
  Word w;
  w.digits.resize(n);
  std::size_t rem = index;
  for (std::size_t i = n; i-- > 0;) {
    w.digits[i] = rem % M + 1;
    rem /= M;
  }
  if (rem != 0) throw ConfigError("word index out of range");
  return w;
}

std::size_t SMeasureWeights::index_of(const Word& w) const {
  if (w.digits.size() != n) throw ConfigError("word length mismatch");
  std::size_t idx = 0;
  for (auto a : w.digits) {
    if (a < 1 || a > M) throw ConfigError("digit outside alphabet");
    idx = idx * M + (a - 1);
  }
  return idx;
}

SMeasureWeights s_measure_weights(const SystemSpec& sys, std::size_t n, double s) {
  if (sys.full_alphabet())
    throw ConfigError("s-measure weights need a finite alphabet");
  if (n < 1) throw ConfigError("s-measure weights need level n >= 1");
  if (checked_leaf_count(sys.M, n) > 10'000'000)
    throw SizeCapError("s-measure enumeration exceeds the 1e7 word cap");

  SMeasureWeights out;
  out.M = sys.M;
  out.n = n;
  out.s = s;
  const std::size_t count = std::size_t(checked_leaf_count(sys.M, n));
  out.weights.resize(count);

  Kahan z;
  if (sys.kind == SystemKind::gauss) {
    std::vector<double> qp(n + 1), qc(n + 1);
    std::vector<std::uint64_t> digit(n + 1, 0);
    qp[0] = 0;
    qc[0] = 1;
    std::size_t depth = 0, idx = 0;
    while (true) {
      if (depth == n) {
        const double ll = -(std::log(qc[depth]) + std::log(qc[depth] + qp[depth]));
        out.weights[idx++] = std::exp(s * ll);
        while (depth > 0 && digit[depth] == sys.M) --depth;
        if (depth == 0) break;
        ++digit[depth];
        qp[depth] = qc[depth - 1];
        qc[depth] = double(digit[depth]) * qc[depth - 1] + qp[depth - 1];
      } else {
        ++depth;
        digit[depth] = 1;
        qp[depth] = qc[depth - 1];
        qc[depth] = qc[depth - 1] + qp[depth - 1];
      }
    }
  } else {
    std::vector<double> pw(sys.M + 1, 0.0);
    for (std::uint64_t a = 1; a <= sys.M; ++a) pw[a] = std::pow(branch_length(sys, a), s);
    std::vector<double> prod(n + 1, 1.0);
    std::vector<std::uint64_t> digit(n + 1, 0);
    std::size_t depth = 0, idx = 0;
    while (true) {
      if (depth == n) {
        out.weights[idx++] = prod[depth];
        while (depth > 0 && digit[depth] == sys.M) --depth;
        if (depth == 0) break;
        ++digit[depth];
        prod[depth] = prod[depth - 1] * pw[digit[depth]];
      } else {
        ++depth;
        digit[depth] = 1;
        prod[depth] = prod[depth - 1] * pw[1];
      }
    }
  }
  for (double w : out.weights) z.add(w);
  out.normalization = z.sum;
  out.log_normalization = std::log(z.sum);
  for (double& w : out.weights) w /= z.sum;
  return out;
}

PressureEstimate pressure_auto(const SystemSpec& sys, double s, std::size_t grid_size) {
  if (sys.affine()) {
    if (sys.full_alphabet()) return pressure_series(sys, s);
    return partition_sum(sys, 1, s);
  }
  return pressure_eigenvalue(sys, s, grid_size);
}

}  // namespace ifsdim
