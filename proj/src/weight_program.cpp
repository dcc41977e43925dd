#include "ifsdim/weight_program.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "ifsdim/errors.hpp"

namespace ifsdim {

namespace {

constexpr std::size_t kNoCol = std::size_t(-1);

// Dense two-phase simplex: minimize cost.x subject to a x = rhs, x >= 0.
// Bland's rule (first negative reduced cost, smallest basic index on ties)
// prevents cycling.  Scalar is double with tol 1e-12, or BigRat with tol 0
// for exact pivoting.
template <class S>
struct Lp {
  std::size_t rows = 0, cols = 0;
  std::vector<std::vector<S>> a;
  std::vector<S> rhs;
  std::vector<S> cost;
};

template <class S>
struct LpSolution {
  std::vector<S> x;
  S value{};
  std::size_t pivots = 0;
};

template <class S>
LpSolution<S> solve_lp(Lp<S> lp, const S& tol) {
  std::size_t m = lp.rows;
  const std::size_t n = lp.cols;
  for (std::size_t r = 0; r < m; ++r) {
    if (lp.rhs[r] < S(0)) {
      for (auto& v : lp.a[r]) v = -v;
      lp.rhs[r] = -lp.rhs[r];
    }
  }

  // tableau: structural columns | m artificials | rhs
  const std::size_t total = n + m;
  std::vector<std::vector<S>> t(m, std::vector<S>(total + 1, S(0)));
  std::vector<std::size_t> basis(m);
  std::vector<char> in_basis(total, 0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) t[r][j] = lp.a[r][j];
    t[r][n + r] = S(1);
    t[r][total] = lp.rhs[r];
    basis[r] = n + r;
    in_basis[n + r] = 1;
  }

  std::size_t pivots = 0;
  auto pivot = [&](std::size_t pr, std::size_t pc) {
    const S p = t[pr][pc];
    for (auto& v : t[pr]) v /= p;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == pr) continue;
      const S f = t[r][pc];
      if (f == S(0)) continue;
      for (std::size_t j = 0; j <= total; ++j) t[r][j] -= f * t[pr][j];
    }
    in_basis[basis[pr]] = 0;
    basis[pr] = pc;
    in_basis[pc] = 1;
    ++pivots;
  };

  auto optimize = [&](const std::vector<S>& c, std::size_t scan_cols) {
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      std::size_t enter = kNoCol;
      for (std::size_t j = 0; j < scan_cols; ++j) {
        if (in_basis[j]) continue;
        S rc = c[j];
        for (std::size_t r = 0; r < m; ++r)
          if (c[basis[r]] != S(0)) rc -= c[basis[r]] * t[r][j];
        if (rc < -tol) {
          enter = j;  // Bland: lowest eligible index
          break;
        }
      }
      if (enter == kNoCol) return;
      std::size_t leave = kNoCol;
      S best{};
      for (std::size_t r = 0; r < m; ++r) {
        if (!(t[r][enter] > tol)) continue;
        const S ratio = t[r][total] / t[r][enter];
        if (leave == kNoCol || ratio < best ||
            (ratio == best && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == kNoCol) throw NumericError("exponent program is unbounded");
      pivot(leave, enter);
    }
    throw NumericError("simplex exceeded the pivot cap");
  };

  // Phase 1: drive artificials to zero.
  std::vector<S> c1(total, S(0));
  for (std::size_t j = n; j < total; ++j) c1[j] = S(1);
  optimize(c1, total);
  S art = S(0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] >= n) art += t[r][total];
  if (art > tol * 1000 || (tol == S(0) && art != S(0)))
    throw NumericError("exponent program infeasible");

  // Remove artificials from the basis (pivot out or drop redundant rows).
  for (std::size_t r = 0; r < m;) {
    if (basis[r] < n) {
      ++r;
      continue;
    }
    std::size_t j = 0;
    for (; j < n; ++j) {
      if (in_basis[j]) continue;
      if (t[r][j] > tol || t[r][j] < -tol) break;
    }
    if (j < n) {
      pivot(r, j);
      ++r;
    } else {
      in_basis[basis[r]] = 0;
      t.erase(t.begin() + std::ptrdiff_t(r));
      basis.erase(basis.begin() + std::ptrdiff_t(r));
      --m;
    }
  }

  // Phase 2 over structural columns only.
  std::vector<S> c2(total, S(0));
  for (std::size_t j = 0; j < n; ++j) c2[j] = lp.cost[j];
  optimize(c2, n);

  LpSolution<S> sol;
  sol.x.assign(n, S(0));
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) sol.x[basis[r]] = t[r][total];
  sol.value = S(0);
  for (std::size_t j = 0; j < n; ++j) sol.value += lp.cost[j] * sol.x[j];
  sol.pivots = pivots;
  return sol;
}

// One stage of the min-max program.  Columns: b_1..b_k | z | u_1..u_k |
// one slack per cap row.  Rows: k exponent rows (A_m - z + u_m = 0), the
// simplex row (t.b = 1), then optional caps z <= z_cap, b_j <= cap_j.
template <class S>
LpSolution<S> solve_stage(const std::vector<S>& t, const S& d, const S& s,
                          const S* z_cap, const std::vector<S>& b_caps,
                          std::size_t minimize_col, const S& tol) {
  const std::size_t k = t.size();
  const std::size_t caps = (z_cap ? 1 : 0) + b_caps.size();
  Lp<S> lp;
  lp.rows = k + 1 + caps;
  lp.cols = 2 * k + 1 + caps;
  lp.a.assign(lp.rows, std::vector<S>(lp.cols, S(0)));
  lp.rhs.assign(lp.rows, S(0));
  lp.cost.assign(lp.cols, S(0));

  const S lead = (d - 1) * s;   // coefficient of b_m in A_m
  const S carry = d * s - 1;    // coefficient of earlier b_j
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = 0; j < r; ++j) lp.a[r][j] = carry;
    lp.a[r][r] = lead;
    lp.a[r][k] = S(-1);
    lp.a[r][k + 1 + r] = S(1);
  }
  for (std::size_t j = 0; j < k; ++j) lp.a[k][j] = t[j];
  lp.rhs[k] = S(1);

  std::size_t row = k + 1, slack = 2 * k + 1;
  if (z_cap) {
    lp.a[row][k] = S(1);
    lp.a[row][slack] = S(1);
    lp.rhs[row] = *z_cap;
    ++row, ++slack;
  }
  for (std::size_t i = 0; i < b_caps.size(); ++i) {
    lp.a[row][i] = S(1);
    lp.a[row][slack] = S(1);
    lp.rhs[row] = b_caps[i];
    ++row, ++slack;
  }

  lp.cost[minimize_col] = S(1);
  return solve_lp(std::move(lp), tol);
}

template <class S>
void validate_program(const std::vector<S>& t, const S& d, const S& s) {
  if (t.empty()) throw ConfigError("exponent program needs at least one position");
  if (t.size() > kMaxPositions) throw ConfigError("exponent program caps positions at 16");
  for (const S& w : t)
    if (!(w > S(0))) throw ConfigError("position weights must be positive");
  if (!(d > S(1))) throw ConfigError("decay exponent must satisfy d > 1");
  if (!(s > S(0))) throw ConfigError("exponent s must be positive");
}

// Shared driver: min-max solve, then lexicographic tightening of b.
template <class S>
void solve_lexicographic(const std::vector<S>& t, const S& d, const S& s,
                         const S& tol, const S& face_slack, S& A_out,
                         std::vector<S>& b_out, std::size_t& pivots_out) {
  validate_program(t, d, s);
  const std::size_t k = t.size();
  auto base = solve_stage<S>(t, d, s, nullptr, {}, k, tol);
  A_out = base.x[k];
  pivots_out = base.pivots;

  const S z_cap = A_out + face_slack;
  std::vector<S> fixed;
  for (std::size_t i = 0; i < k; ++i) {
    auto st = solve_stage<S>(t, d, s, &z_cap, fixed, i, tol);
    pivots_out += st.pivots;
    fixed.push_back(st.x[i] + face_slack);
    st.x.resize(k);
    b_out = std::move(st.x);
  }
  // the caps carry the slack; the reported b is the final stage's solution
}

}  // namespace

double a_component(double d, double s, const std::vector<double>& b, std::size_t m) {
  if (m < 1 || m > b.size()) throw ConfigError("exponent position out of range");
  double prefix = 0;
  for (std::size_t j = 0; j + 1 < m; ++j) prefix += b[j];
  return (d - 1) * s * b[m - 1] + (d * s - 1) * prefix;
}

double a_objective(const std::vector<double>& t, double d, double s,
                   const std::vector<double>& b) {
  if (b.size() != t.size()) throw ConfigError("b and t dimensions differ");
  double prefix = 0, best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < b.size(); ++m) {
    best = std::max(best, (d - 1) * s * b[m] + (d * s - 1) * prefix);
    prefix += b[m];
  }
  return best;
}

AResult a_of_s(const std::vector<double>& t, double d, double s) {
  AResult out;
  solve_lexicographic<double>(t, d, s, 1e-12, 1e-10, out.A, out.b, out.pivots);
  return out;
}

ARationalResult a_of_s_exact(const std::vector<BigRat>& t, const BigRat& d, const BigRat& s) {
  ARationalResult out;
  solve_lexicographic<BigRat>(t, d, s, BigRat(0), BigRat(0), out.A, out.b, out.pivots);
  return out;
}

GridScan a_of_s_grid(const std::vector<double>& t, double d, double s, double step) {
  validate_program(t, d, s);
  if (!(step >= 1e-5 - 1e-18) || !(step <= 0.1 + 1e-15))
    throw ConfigError("lattice step must lie in [1e-5, 1e-1]");
  const std::size_t k = t.size();
  constexpr std::uint64_t kPointCap = 100'000'000;

  std::vector<double> cur(k, 0.0);
  GridScan out;
  out.A = std::numeric_limits<double>::infinity();

  // pass 0 counts (cap check), pass 1 evaluates; enumeration is
  // lexicographic in (b_1..b_{k-1}), b_k closes the simplex constraint
  for (int pass = 0; pass < 2; ++pass) {
    std::uint64_t points = 0;
    auto rec = [&](auto&& self, std::size_t j, double used) -> void {
      if (j + 1 == k) {
        cur[j] = std::max(0.0, (1.0 - used) / t[j]);
        ++points;
        if (pass == 0) {
          if (points > kPointCap)
            throw SizeCapError("lattice scan exceeds the 1e8 point cap; coarsen the step");
          return;
        }
        const double val = a_objective(t, d, s, cur);
        if (val < out.A) {
          out.A = val;
          out.b = cur;
        }
        return;
      }
      for (std::uint64_t i = 0;; ++i) {
        const double b = double(i) * step;
        const double next = used + t[j] * b;
        if (next > 1.0 + 1e-12) break;
        cur[j] = b;
        self(self, j + 1, next);
      }
    };
    rec(rec, 0, 0.0);
    out.points = points;
  }
  return out;
}

}  // namespace ifsdim
